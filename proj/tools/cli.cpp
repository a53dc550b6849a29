#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "cdnots/assumptions.hpp"
#include "cdnots/dataset.hpp"
#include "cdnots/discovery.hpp"
#include "cdnots/graph.hpp"
#include "cdnots/simbench.hpp"

namespace cdnots::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Files written so far; removed unless the command completes.
class OutputSet {
public:
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
    }

    void write(const fs::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        written_.push_back(path);
        f << text;
        if (!f.flush()) throw std::runtime_error("failed writing " + path.string());
    }

    void commit() { committed_ = true; }

private:
    std::vector<fs::path> written_;
    bool committed_ = false;
};

std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || r.ec != std::errc{} || r.ptr != item.data() + item.size()) {
            throw std::invalid_argument("bad " + what + " value '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty " + what + " list");
    return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_doubles(text, what)) {
        if (v != std::floor(v)) throw std::invalid_argument("bad " + what + " value '" + num(v) + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splices `--key=value` for every config key not given on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    if (args.empty()) return args;
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;
    std::vector<std::string> extra;
    for (const auto& [key, value] : read_config_file(*path)) {
        const std::string flag = "--" + key;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (!given) extra.push_back(flag + "=" + value);
    }
    args.insert(args.begin() + 1, extra.begin(), extra.end());
    return args;
}

struct DiscoverOptions {
    std::string input;
    int max_lag = 1;
    double alpha = 0.05;
    std::string ci_test = "auto";
    std::uint64_t seed = 0;
    int max_cond_size = -1;
    std::string stage4 = "on";
    std::string alpha_sweep;
    std::string out_dir = ".";
    int threads = 0;
    std::string config;
};

CiTestKind resolve_test(const std::string& name, Eigen::Index rows) {
    if (name == "auto") return rows >= 200 ? CiTestKind::KcitHbe : CiTestKind::ParCorr;
    return parse_ci_test(name);
}

std::string stationarity_json(const MixedGraph& g) {
    json arr = json::array();
    for (const auto& e : stationarity_report(g)) arr.push_back({{"variable", e.name}, {"nonstationary", e.nonstationary}});
    return arr.dump(2) + "\n";
}

std::string testlog_json(const DiscoveryResult& res, const DiscoveryConfig& cfg) {
    json j;
    j["ci_test"] = std::string(ci_test_name(cfg.ci.kind));
    j["alpha"] = cfg.alpha;
    j["seed"] = cfg.seed;
    j["total_tests"] = res.log.skeleton_tests();
    j["tests_per_level"] = res.log.tests_per_level;
    j["stage4_evaluations"] = res.log.stage4_evaluations;
    j["warnings"] = res.log.warnings;
    json removed = json::array();
    for (const auto& [key, sep] : res.sepsets.sets) {
        json s = json::array();
        for (const auto& n : sep) s.push_back(res.graph.label(n));
        removed.push_back({{"from", res.graph.label(key.first)}, {"to", res.graph.label(key.second)}, {"sepset", s}});
    }
    j["removed"] = removed;
    return j.dump(2) + "\n";
}

std::string mark_word(const std::optional<EdgeMark>& m) {
    if (!m) return "absent";
    return m->mark == Mark::Undirected ? "undirected" : "directed";
}

int cmd_discover(const DiscoverOptions& o, std::ostream& out) {
    const TimeSeriesDataset ds = load_csv(o.input);
    DiscoveryConfig cfg;
    cfg.max_lag = o.max_lag;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.ci.kind = resolve_test(o.ci_test, ds.rows());
    if (o.max_cond_size >= 0) cfg.max_cond_size = o.max_cond_size;
    if (o.stage4 != "on" && o.stage4 != "off") throw std::invalid_argument("--stage4 must be on or off");
    cfg.stage4_enabled = o.stage4 == "on";
    cfg.validate();

    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    OutputSet files;

    if (o.alpha_sweep.empty()) {
        const DiscoveryResult res = discover(ds, cfg);
        files.write(dir / "graph.json", to_json(res.graph) + "\n");
        files.write(dir / "graph.dot", to_dot(res.graph));
        files.write(dir / "stationarity.json", stationarity_json(res.graph));
        files.write(dir / "testlog.json", testlog_json(res, cfg));
        files.commit();
        out << "discovered " << res.graph.edges().size() << " edge classes with " << res.log.skeleton_tests() << " "
            << ci_test_name(cfg.ci.kind) << " tests; outputs in " << dir.string() << "\n";
        for (const auto& w : res.log.warnings) out << "warning: " << w << "\n";
        return 0;
    }

    const std::vector<double> alphas = parse_doubles(o.alpha_sweep, "alpha");
    std::vector<MixedGraph> graphs;
    for (double a : alphas) {
        DiscoveryConfig c = cfg;
        c.alpha = a;
        c.validate();
        const DiscoveryResult res = discover(ds, c);
        const std::string stem = "graph_alpha_" + num(a);
        files.write(dir / (stem + ".json"), to_json(res.graph) + "\n");
        files.write(dir / (stem + ".dot"), to_dot(res.graph));
        graphs.push_back(res.graph);
    }
    std::set<EdgeKey> keys;
    for (const auto& g : graphs) {
        for (const auto& [k, e] : g.edges()) keys.insert(k);
    }
    std::ostringstream table;
    table << "from,to,lag";
    for (double a : alphas) table << ",alpha_" << num(a);
    table << ",present_in\n";
    for (const auto& k : keys) {
        const MixedGraph& g0 = graphs.front();
        table << g0.label(k.first) << ',' << g0.label(k.second) << ',' << k.lag();
        int present = 0;
        for (const auto& g : graphs) {
            const auto e = g.edge(k);
            present += e.has_value();
            std::string word = mark_word(e);
            if (e && e->mark == Mark::Backward) word = "reversed";
            table << ',' << word;
        }
        table << ',' << present << '\n';
    }
    files.write(dir / "stability.csv", table.str());
    files.commit();
    out << "alpha sweep over " << alphas.size() << " levels; " << keys.size() << " edge classes seen; outputs in "
        << dir.string() << "\n";
    return 0;
}

struct SimOptions {
    int nodes = 3;
    int samples = 500;
    int max_lag = 1;
    double density = 0.2;
    std::string mechanisms = "linear:1";
    double noise = 1.0;
    std::uint64_t seed = 0;
};

SimSpec make_spec(const SimOptions& o) {
    SimSpec s;
    s.n_nodes = o.nodes;
    s.n_samples = o.samples;
    s.max_lag = o.max_lag;
    s.edge_density = o.density;
    s.mechanisms = parse_mechanisms(o.mechanisms);
    s.noise_scale = o.noise;
    s.seed = o.seed;
    s.validate();
    return s;
}

int cmd_simulate(const SimOptions& o, const std::string& out_dir, std::ostream& out) {
    const SimInstance inst = generate(make_spec(o));
    fs::create_directories(out_dir);
    OutputSet files;
    std::ostringstream csv;
    write_csv(inst.data, csv);
    files.write(fs::path(out_dir) / "data.csv", csv.str());
    files.write(fs::path(out_dir) / "truth.json", to_json(inst.truth) + "\n");
    files.commit();
    out << "simulated " << inst.data.rows() << " x " << inst.data.cols() << " with " << inst.truth.edges().size()
        << " true edge classes; outputs in " << out_dir << "\n";
    return 0;
}

struct BenchOptions {
    std::string nodes = "3,5";
    std::string samples = "50,1000";
    int seeds = 10;
    std::string tests = "parcorr,kcit-hbe";
    std::string alphas = "0.05";
    std::string out;
};

int cmd_benchmark(const SimOptions& so, const BenchOptions& bo, std::ostream& out) {
    BenchmarkGrid grid;
    SimSpec tmpl = make_spec(so);
    grid.specs = desk_specs(tmpl, parse_ints(bo.nodes, "nodes"), parse_ints(bo.samples, "samples"), bo.seeds);
    std::stringstream ss(bo.tests);
    std::string t;
    while (std::getline(ss, t, ',')) grid.tests.push_back(parse_ci_test(t));
    grid.alphas = parse_doubles(bo.alphas, "alpha");
    const auto rows = run_benchmark(grid, bo.out);

    std::map<std::tuple<std::string, double, int>, std::pair<double, int>> agg;
    int failed = 0;
    for (const auto& r : rows) {
        if (r.status != "ok") {
            ++failed;
            continue;
        }
        auto& a = agg[{r.test_name, r.alpha, r.spec.n_samples}];
        a.first += r.metrics.f_score;
        ++a.second;
    }
    out << "test,alpha,n_samples,mean_f,rows\n";
    for (const auto& [k, v] : agg) {
        out << std::get<0>(k) << ',' << num(std::get<1>(k)) << ',' << std::get<2>(k) << ','
            << std::setprecision(4) << v.first / v.second << ',' << v.second << '\n';
    }
    if (failed) out << failed << " rows recorded errors\n";
    return 0;
}

struct DiagnoseOptions {
    std::string graph;
    std::string input;
    double alpha = 0.05;
    std::string ci_test = "kcit-hbe";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out) {
    std::ifstream gf(o.graph);
    if (!gf) throw std::runtime_error("cannot open " + o.graph);
    std::stringstream gs;
    gs << gf.rdbuf();
    const MixedGraph g = graph_from_json(gs.str());
    const TimeSeriesDataset ds = load_csv(o.input);
    if (ds.names() != g.names()) throw std::invalid_argument("diagnose: dataset columns do not match the graph's variables");
    const LaggedDesignMatrix design = lag_embed(standardize(ds), g.max_lag());

    LinearityConfig cfg;
    cfg.alpha = o.alpha;
    cfg.ci.kind = parse_ci_test(o.ci_test);
    cfg.seed = o.seed;

    std::ostringstream lines;
    int n = 0;
    for (int j = 0; j < g.n_vars(); ++j) {
        const LaggedNode child = LaggedNode::variable(j, 0);
        std::vector<LaggedNode> parents;
        for (const auto& p : g.nodes()) {
            if (!p.is_time() && g.directed(p, child)) parents.push_back(p);
        }
        for (const auto& p : parents) {
            std::vector<LaggedNode> rest;
            for (const auto& q : parents) {
                if (q != p) rest.push_back(q);
            }
            LinearityReport rep = linearity_test(design.column(child), design.column(p), design.gather(rest), cfg);
            json j_rep;
            j_rep["target"] = g.label(child);
            j_rep["tested_parent"] = g.label(p);
            json cond = json::array();
            for (const auto& q : rest) cond.push_back(g.label(q));
            j_rep["conditioning"] = cond;
            j_rep["p_value"] = rep.p_value;
            j_rep["verdict"] = rep.reject ? "reject" : "fail-to-reject";
            j_rep["ci_test"] = rep.test_name;
            lines << j_rep.dump() << "\n";
            ++n;
        }
    }
    if (o.out.empty()) {
        out << lines.str();
    } else {
        OutputSet files;
        files.write(o.out, lines.str());
        files.commit();
        out << n << " linearity reports written to " << o.out << "\n";
    }
    return 0;
}

void add_sim_options(CLI::App* app, SimOptions& o) {
    app->add_option("--nodes", o.nodes, "Number of series")->check(CLI::PositiveNumber);
    app->add_option("--samples", o.samples, "Time points")->check(CLI::PositiveNumber);
    app->add_option("--max-lag", o.max_lag, "Largest lag of a true edge")->check(CLI::NonNegativeNumber);
    app->add_option("--density", o.density, "Edge probability");
    app->add_option("--mechanisms", o.mechanisms, "Weighted mechanisms, e.g. linear:1;sine:1");
    app->add_option("--noise", o.noise, "Noise standard deviation");
    app->add_option("--seed", o.seed, "Random seed");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        out.emplace_back(key, value);
    }
    return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal discovery from nonstationary time series", "cdnots"};
    app.require_subcommand(1);

    DiscoverOptions d;
    auto* disc = app.add_subcommand("discover", "Learn a lagged causal graph from a CSV file");
    disc->add_option("--input", d.input, "CSV with one column per series")->required();
    disc->add_option("--max-lag", d.max_lag, "Largest lag considered")->check(CLI::NonNegativeNumber);
    disc->add_option("--alpha", d.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    disc->add_option("--ci-test", d.ci_test, "auto, parcorr, kcit-sw, kcit-hbe, rcot-sw, rcot-hbe or cmiknn")
        ->check(CLI::IsMember({"auto", "parcorr", "kcit-sw", "kcit-hbe", "rcot-sw", "rcot-hbe", "cmiknn"}));
    disc->add_option("--seed", d.seed, "Seed for randomized tests");
    disc->add_option("--max-cond-size", d.max_cond_size, "Largest conditioning set (default depends on N)");
    disc->add_option("--stage4", d.stage4, "Module-change orientation")->check(CLI::IsMember({"on", "off"}));
    disc->add_option("--alpha-sweep", d.alpha_sweep, "Comma-separated alphas; one graph per level");
    disc->add_option("--out-dir", d.out_dir, "Output directory");
    disc->add_option("--threads", d.threads, "Worker threads (0: CDNOTS_THREADS or all cores)");
    disc->add_option("--config", d.config, "key = value file mirroring the flags");

    SimOptions so;
    std::string sim_out = ".";
    std::string sim_config;
    auto* sim = app.add_subcommand("simulate", "Write a synthetic dataset and its true graph");
    add_sim_options(sim, so);
    sim->add_option("--out-dir", sim_out, "Output directory");
    sim->add_option("--config", sim_config, "key = value file mirroring the flags");

    SimOptions bso;
    BenchOptions bo;
    std::string bench_config;
    auto* bench = app.add_subcommand("benchmark", "Run discovery over a grid of synthetic instances");
    add_sim_options(bench, bso);
    bench->add_option("--node-counts", bo.nodes, "Comma-separated node counts");
    bench->add_option("--sample-sizes", bo.samples, "Comma-separated sample sizes");
    bench->add_option("--seeds", bo.seeds, "Instances per (nodes, samples) cell")->check(CLI::PositiveNumber);
    bench->add_option("--tests", bo.tests, "Comma-separated CI tests");
    bench->add_option("--alphas", bo.alphas, "Comma-separated significance levels");
    bench->add_option("--out", bo.out, "Results CSV (appended, resumable)")->required();
    bench->add_option("--config", bench_config, "key = value file mirroring the flags");

    DiagnoseOptions dg;
    std::string diag_config;
    auto* diag = app.add_subcommand("diagnose", "Linearity test for every directed parent of each series");
    diag->add_option("--graph", dg.graph, "graph.json from discover")->required();
    diag->add_option("--input", dg.input, "CSV the graph was learned from")->required();
    diag->add_option("--alpha", dg.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    diag->add_option("--ci-test", dg.ci_test, "CI test on the regression residual")
        ->check(CLI::IsMember({"parcorr", "kcit-sw", "kcit-hbe", "rcot-sw", "rcot-hbe", "cmiknn"}));
    diag->add_option("--seed", dg.seed, "Seed for randomized tests");
    diag->add_option("--out", dg.out, "JSON lines file (default: stdout)");
    diag->add_option("--config", diag_config, "key = value file mirroring the flags");

    try {
        std::vector<std::string> args = apply_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (disc->parsed()) return cmd_discover(d, out);
        if (sim->parsed()) return cmd_simulate(so, sim_out, out);
        if (bench->parsed()) return cmd_benchmark(bso, bo, out);
        if (diag->parsed()) return cmd_diagnose(dg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace cdnots::cli

#include <chrono>
#include <charconv>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cdnots/simbench.hpp"

namespace cdnots {

namespace {

std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

long long to_int(const std::string& s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = c == ',' ? ';' : ' ';
    }
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Shares results between runs that only differ in alpha.
class MemoTester final : public CiTester {
public:
    explicit MemoTester(CiTester& inner) : inner_(inner) {}

    CITestResult test(const LaggedNode& a, const LaggedNode& b, std::span<const LaggedNode> cond,
                      std::uint64_t seed) override {
        Key key{a, b, {cond.begin(), cond.end()}, seed};
        {
            std::lock_guard lock(mutex_);
            if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        }
        CITestResult r = inner_.test(a, b, cond, seed);
        std::lock_guard lock(mutex_);
        memo_.emplace(std::move(key), r);
        return r;
    }

    std::string_view name() const override { return inner_.name(); }

private:
    using Key = std::tuple<LaggedNode, LaggedNode, std::vector<LaggedNode>, std::uint64_t>;
    CiTester& inner_;
    std::mutex mutex_;
    std::map<Key, CITestResult> memo_;
};

}  // namespace

const std::vector<std::string> kBenchmarkColumns{
    "n_nodes",   "n_samples", "max_lag", "edge_density", "mechanisms", "noise_scale", "coef_min", "coef_max",
    "test_name", "alpha",     "precision", "recall",     "f_score",    "shd",         "wall_ms",  "n_tests",
    "seed",      "status"};

void BenchmarkGrid::validate() const {
    if (specs.empty() || tests.empty() || alphas.empty()) throw std::invalid_argument("benchmark: empty grid");
    for (const auto& s : specs) s.validate();
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("benchmark: alpha must lie in (0, 1)");
    }
}

std::vector<SimSpec> desk_specs(const SimSpec& tmpl, const std::vector<int>& nodes, const std::vector<int>& samples,
                                int n_seeds) {
    std::vector<SimSpec> out;
    for (int nn : nodes) {
        for (int ns : samples) {
            for (int s = 0; s < n_seeds; ++s) {
                SimSpec spec = tmpl;
                spec.n_nodes = nn;
                spec.n_samples = ns;
                spec.seed = tmpl.seed + static_cast<std::uint64_t>(s);
                out.push_back(spec);
            }
        }
    }
    return out;
}

std::string BenchmarkRow::key() const {
    return std::to_string(spec.n_nodes) + ',' + std::to_string(spec.n_samples) + ',' + std::to_string(spec.max_lag) +
           ',' + num(spec.edge_density) + ',' + format_mechanisms(spec.mechanisms) + ',' + num(spec.noise_scale) + ',' +
           num(spec.coef_min) + ',' + num(spec.coef_max) + ',' + std::to_string(spec.seed) + ',' + test_name + ',' +
           num(alpha);
}

std::string format_row(const BenchmarkRow& r) {
    const auto& s = r.spec;
    const auto& m = r.metrics;
    return std::to_string(s.n_nodes) + ',' + std::to_string(s.n_samples) + ',' + std::to_string(s.max_lag) + ',' +
           num(s.edge_density) + ',' + format_mechanisms(s.mechanisms) + ',' + num(s.noise_scale) + ',' +
           num(s.coef_min) + ',' + num(s.coef_max) + ',' + r.test_name + ',' + num(r.alpha) + ',' + num(m.precision) +
           ',' + num(m.recall) + ',' + num(m.f_score) + ',' + std::to_string(m.shd) + ',' + num(r.wall_ms) + ',' +
           std::to_string(r.n_tests) + ',' + std::to_string(s.seed) + ',' + sanitize(r.status);
}

std::vector<BenchmarkRow> read_benchmark_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) return {};
    if (split(line) != kBenchmarkColumns) throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<BenchmarkRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != kBenchmarkColumns.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(kBenchmarkColumns.size()) + " fields");
        }
        BenchmarkRow r;
        r.spec.n_nodes = static_cast<int>(to_int(f[0]));
        r.spec.n_samples = static_cast<int>(to_int(f[1]));
        r.spec.max_lag = static_cast<int>(to_int(f[2]));
        r.spec.edge_density = to_double(f[3]);
        r.spec.mechanisms = parse_mechanisms(f[4]);
        r.spec.noise_scale = to_double(f[5]);
        r.spec.coef_min = to_double(f[6]);
        r.spec.coef_max = to_double(f[7]);
        r.test_name = f[8];
        r.alpha = to_double(f[9]);
        r.metrics.precision = to_double(f[10]);
        r.metrics.recall = to_double(f[11]);
        r.metrics.f_score = to_double(f[12]);
        r.metrics.shd = static_cast<int>(to_int(f[13]));
        r.wall_ms = to_double(f[14]);
        r.n_tests = static_cast<std::size_t>(to_int(f[15]));
        r.spec.seed = static_cast<std::uint64_t>(to_int(f[16]));
        r.status = f[17];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkGrid& grid, const std::filesystem::path& out) {
    grid.validate();
    std::vector<BenchmarkRow> rows;
    std::set<std::string> done;
    const bool exists = std::filesystem::exists(out) && std::filesystem::file_size(out) > 0;
    if (exists) {
        rows = read_benchmark_csv(out);
        for (const auto& r : rows) done.insert(r.key());
    }
    std::ofstream file(out, std::ios::app);
    if (!file) throw std::runtime_error("cannot write " + out.string());
    if (!exists) {
        for (std::size_t i = 0; i < kBenchmarkColumns.size(); ++i) file << (i ? "," : "") << kBenchmarkColumns[i];
        file << '\n' << std::flush;
    }

    for (const auto& spec : grid.specs) {
        auto pending = [&](CiTestKind kind, double alpha) {
            BenchmarkRow r;
            r.spec = spec;
            r.test_name = std::string(ci_test_name(kind));
            r.alpha = alpha;
            return done.contains(r.key()) ? std::optional<BenchmarkRow>{} : std::optional<BenchmarkRow>{r};
        };
        bool any = false;
        for (CiTestKind k : grid.tests) {
            for (double a : grid.alphas) any = any || pending(k, a).has_value();
        }
        if (!any) continue;

        std::optional<SimInstance> inst;
        std::optional<LaggedDesignMatrix> design;
        std::string setup_error;
        try {
            inst.emplace(generate(spec));
            design.emplace(lag_embed(standardize(inst->data), spec.max_lag));
        } catch (const std::exception& e) {
            setup_error = e.what();
        }

        for (CiTestKind kind : grid.tests) {
            std::unique_ptr<CiTester> tester;
            std::unique_ptr<MemoTester> memo;
            std::string test_error = setup_error;
            if (test_error.empty()) {
                try {
                    DiscoveryConfig ccfg = grid.base;
                    ccfg.ci.kind = kind;
                    tester = make_tester(*design, ccfg.ci);
                    memo = std::make_unique<MemoTester>(*tester);
                } catch (const std::exception& e) {
                    test_error = e.what();
                }
            }
            for (double alpha : grid.alphas) {
                auto row = pending(kind, alpha);
                if (!row) continue;
                if (!test_error.empty()) {
                    row->status = "error: " + test_error;
                } else {
                    DiscoveryConfig cfg = grid.base;
                    cfg.ci.kind = kind;
                    cfg.alpha = alpha;
                    cfg.max_lag = spec.max_lag;
                    cfg.seed = spec.seed;
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        const DiscoveryResult res = discover(*design, inst->data.names(), cfg, *memo);
                        row->metrics = evaluate(inst->truth, res.graph);
                        row->n_tests = res.log.skeleton_tests();
                    } catch (const std::exception& e) {
                        row->status = std::string("error: ") + e.what();
                    }
                    row->wall_ms =
                        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                }
                file << format_row(*row) << '\n' << std::flush;
                done.insert(row->key());
                rows.push_back(std::move(*row));
            }
        }
    }
    if (!file) throw std::runtime_error("failed writing " + out.string());
    return rows;
}

}  // namespace cdnots

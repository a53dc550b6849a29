#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cdnots/simbench.hpp"

namespace cdnots {

namespace {

constexpr int kMaxAttempts = 1000;
constexpr double kRadiusLimit = 0.95;
constexpr double kRadiusTarget = 0.9;

double clip3(double x) { return std::clamp(x, -3.0, 3.0); }

// Spectral radius of the companion matrix of the reduced-form linear lag
// polynomial x_t = (I - A0)^-1 sum_l A_l x_{t-l}.
double linear_lag_radius(const std::vector<SimEdge>& edges, int n, int max_lag) {
    if (max_lag == 0) return 0.0;
    Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::MatrixXd> al(static_cast<std::size_t>(max_lag), Eigen::MatrixXd::Zero(n, n));
    for (const auto& e : edges) {
        if (e.mechanism != Mechanism::Linear) continue;
        if (e.from.lag == 0) {
            a0(e.to, e.from.var) += e.coef;
        } else {
            al[static_cast<std::size_t>(e.from.lag - 1)](e.to, e.from.var) += e.coef;
        }
    }
    const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(n, n) - a0).inverse();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n * max_lag, n * max_lag);
    for (int l = 0; l < max_lag; ++l) comp.block(0, l * n, n, n) = inv * al[static_cast<std::size_t>(l)];
    if (max_lag > 1) comp.bottomLeftCorner(n * (max_lag - 1), n * (max_lag - 1)).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

std::string_view mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::Linear:
            return "linear";
        case Mechanism::Quadratic:
            return "quadratic";
        case Mechanism::Exponential:
            return "exponential";
        case Mechanism::Sine:
            return "sine";
    }
    return "unknown";
}

Mechanism parse_mechanism(std::string_view name) {
    for (Mechanism m : {Mechanism::Linear, Mechanism::Quadratic, Mechanism::Exponential, Mechanism::Sine}) {
        if (mechanism_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown mechanism '" + std::string(name) + "'");
}

double apply_mechanism(Mechanism m, double coef, double x) {
    switch (m) {
        case Mechanism::Linear:
            return coef * x;
        case Mechanism::Quadratic:
            return coef * clip3(x) * clip3(x);
        case Mechanism::Exponential:
            return coef * std::exp(clip3(x));
        case Mechanism::Sine:
            return coef * std::sin(x);
    }
    return 0.0;
}

std::string format_mechanisms(const std::vector<std::pair<Mechanism, double>>& m) {
    std::string out;
    for (const auto& [mech, w] : m) {
        if (!out.empty()) out += ';';
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, w);
        out += std::string(mechanism_name(mech)) + ':' + std::string(buf, r.ptr);
    }
    return out;
}

std::vector<std::pair<Mechanism, double>> parse_mechanisms(std::string_view text) {
    std::vector<std::pair<Mechanism, double>> out;
    while (!text.empty()) {
        const auto semi = text.find(';');
        std::string_view item = text.substr(0, semi);
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        double w = 1.0;
        if (colon != std::string_view::npos) {
            const auto num = item.substr(colon + 1);
            const auto r = std::from_chars(num.data(), num.data() + num.size(), w);
            if (r.ec != std::errc{} || r.ptr != num.data() + num.size()) {
                throw std::invalid_argument("bad mechanism weight in '" + std::string(item) + "'");
            }
            item = item.substr(0, colon);
        }
        out.emplace_back(parse_mechanism(item), w);
    }
    if (out.empty()) throw std::invalid_argument("no mechanisms given");
    return out;
}

void SimSpec::validate() const {
    if (n_nodes < 1) throw std::invalid_argument("sim: n_nodes must be positive");
    if (max_lag < 0) throw std::invalid_argument("sim: max_lag must be non-negative");
    if (n_samples < max_lag + 3) throw std::invalid_argument("sim: n_samples too small for max_lag");
    if (!(edge_density > 0.0 && edge_density <= 1.0)) throw std::invalid_argument("sim: edge_density must lie in (0, 1]");
    if (!(noise_scale > 0.0)) throw std::invalid_argument("sim: noise_scale must be positive");
    if (!(coef_min >= 0.3 && coef_max >= coef_min)) throw std::invalid_argument("sim: coefficient range must satisfy 0.3 <= min <= max");
    if (mechanisms.empty()) throw std::invalid_argument("sim: no mechanisms");
    double total = 0.0;
    for (const auto& [m, w] : mechanisms) {
        if (!(w >= 0.0)) throw std::invalid_argument("sim: mechanism weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("sim: mechanism weights sum to zero");
}

SimInstance generate(const SimSpec& spec) {
    spec.validate();
    const int n = spec.n_nodes;
    const int lmax = spec.max_lag;
    const int burn = 10 * (lmax + 1);
    const int total = spec.n_samples + burn;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(spec.coef_min, spec.coef_max);
    std::normal_distribution<double> gauss(0.0, spec.noise_scale);
    std::vector<double> weights;
    for (const auto& mw : spec.mechanisms) weights.push_back(mw.second);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        // Contemporaneous edges follow a random causal order, so the
        // unrolled graph is acyclic by construction.
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<SimEdge> edges;
        auto draw = [&](LaggedNode from, int to) {
            const Mechanism m = spec.mechanisms[pick(rng)].first;
            const double c = (unit(rng) < 0.5 ? -1.0 : 1.0) * magnitude(rng);
            edges.push_back({from, to, m, c});
        };
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (unit(rng) < spec.edge_density) draw(LaggedNode::variable(order[static_cast<std::size_t>(a)], 0), order[static_cast<std::size_t>(b)]);
            }
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                for (int l = 1; l <= lmax; ++l) {
                    if (unit(rng) < spec.edge_density) draw(LaggedNode::variable(i, l), j);
                }
            }
        }

        const double radius = linear_lag_radius(edges, n, lmax);
        if (radius >= kRadiusLimit) {
            const double s = kRadiusTarget / radius;
            for (auto& e : edges) {
                if (e.mechanism == Mechanism::Linear && e.from.lag > 0) e.coef *= std::pow(s, e.from.lag);
            }
        }

        std::vector<std::vector<const SimEdge*>> incoming(static_cast<std::size_t>(n));
        for (const auto& e : edges) incoming[static_cast<std::size_t>(e.to)].push_back(&e);
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, n);
        Eigen::MatrixXd eps(total, n);
        for (int t = 0; t < total; ++t) {
            for (int j : order) {
                double v = gauss(rng);
                eps(t, j) = v;
                for (const SimEdge* e : incoming[static_cast<std::size_t>(j)]) {
                    const int src = t - e->from.lag;
                    if (src >= 0) v += apply_mechanism(e->mechanism, e->coef, x(src, e->from.var));
                }
                x(t, j) = v;
            }
        }
        if (!x.allFinite()) continue;

        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
        MixedGraph truth(n, lmax, names);
        for (const auto& e : edges) {
            const LaggedNode to = LaggedNode::variable(e.to, 0);
            if (e.from.lag > 0 || e.from.var < e.to) {
                truth.set_edge({e.from, to}, {Mark::Forward, 0.0});
            } else {
                truth.set_edge({to, e.from}, {Mark::Backward, 0.0});
            }
        }
        return SimInstance{std::move(truth), TimeSeriesDataset(x.bottomRows(spec.n_samples), names), spec,
                           std::move(edges), eps.bottomRows(spec.n_samples)};
    }
    throw std::runtime_error("sim: no finite instance after " + std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace cdnots

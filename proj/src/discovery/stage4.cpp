#include <algorithm>
#include <cmath>
#include <limits>

#include "cdnots/discovery.hpp"
#include "window_pdag.hpp"

namespace cdnots {

namespace {

constexpr double kRidge = 1e-6;

double abs_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    const double na = ca.norm();
    const double nb = cb.norm();
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    return std::abs(ca.dot(cb) / (na * nb));
}

}  // namespace

double module_change_score(const LaggedDesignMatrix& design, const MixedGraph& g, const LaggedNode& cause,
                           const LaggedNode& effect, int blocks) {
    std::vector<LaggedNode> parents{cause};
    for (const auto& p : g.nodes()) {
        if (p != cause && !p.is_time() && g.directed(p, effect)) parents.push_back(p);
    }
    const Eigen::Index n = design.rows();
    const Eigen::Index p = static_cast<Eigen::Index>(parents.size()) + 1;
    const Eigen::VectorXd x = design.column(cause);
    const Eigen::VectorXd y = design.column(effect);
    const Eigen::MatrixXd pm = design.gather(parents);

    Eigen::MatrixXd cause_desc(blocks, 2);
    Eigen::MatrixXd effect_desc(blocks, p + 1);
    for (int b = 0; b < blocks; ++b) {
        const Eigen::Index lo = n * b / blocks;
        const Eigen::Index len = n * (b + 1) / blocks - lo;
        const Eigen::VectorXd xb = x.segment(lo, len);
        const double mean = xb.mean();
        cause_desc(b, 0) = mean;
        cause_desc(b, 1) = (xb.array() - mean).square().mean();

        Eigen::MatrixXd a(len, p);
        a.col(0).setOnes();
        a.rightCols(p - 1) = pm.middleRows(lo, len);
        const Eigen::VectorXd yb = y.segment(lo, len);
        Eigen::MatrixXd gram = a.transpose() * a;
        gram.diagonal().array() += kRidge * static_cast<double>(len);
        const Eigen::VectorXd coef = gram.ldlt().solve(a.transpose() * yb);
        effect_desc.row(b).head(p) = coef.transpose();
        effect_desc(b, p) = (yb - a * coef).squaredNorm() / static_cast<double>(len);
    }

    double score = 0.0;
    for (Eigen::Index i = 0; i < cause_desc.cols(); ++i) {
        for (Eigen::Index j = 0; j < effect_desc.cols(); ++j) {
            score = std::max(score, abs_corr(cause_desc.col(i), effect_desc.col(j)));
        }
    }
    return score;
}

MixedGraph orient_stage4(MixedGraph g, const LaggedDesignMatrix& design, const DiscoveryConfig& cfg, TestLog* log) {
    if (!cfg.stage4_enabled || std::isinf(cfg.stage4_margin)) return g;
    const int blocks = cfg.stage4_window;
    if (design.rows() / blocks < cfg.stage4_min_block_rows) {
        if (log) {
            log->warnings.push_back("stage 4 skipped: " + std::to_string(design.rows()) + " rows give fewer than " +
                                    std::to_string(cfg.stage4_min_block_rows) + " per block");
        }
        return g;
    }
    auto nonstationary = [&](int var) { return g.edge({LaggedNode::time(), LaggedNode::variable(var, 0)}).has_value(); };

    std::vector<EdgeKey> candidates;
    for (const auto& [key, em] : g.edges()) {
        if (em.mark != Mark::Undirected || key.first.is_time() || key.first.lag != 0) continue;
        if (nonstationary(key.first.var) && nonstationary(key.second.var)) candidates.push_back(key);
    }
    if (candidates.empty()) return g;

    detail::WindowPdag w(g);
    bool changed = false;
    for (const auto& key : candidates) {
        if (g.edge(key)->mark != Mark::Undirected) continue;
        const double s_fwd = module_change_score(design, g, key.first, key.second, blocks);
        const double s_bwd = module_change_score(design, g, key.second, key.first, blocks);
        if (log) log->stage4_evaluations += 2;
        const double hi = std::max(s_fwd, s_bwd);
        const double lo = std::min(s_fwd, s_bwd);
        if (!(hi > 0.0) || (hi - lo) / hi <= cfg.stage4_margin) continue;
        const LaggedNode from = s_fwd < s_bwd ? key.first : key.second;
        const LaggedNode to = s_fwd < s_bwd ? key.second : key.first;
        if (w.orient_class(w.index(from), w.index(to))) {
            changed = true;
        } else if (log) {
            log->warnings.push_back("stage 4 could not orient " + g.label(from) + " -> " + g.label(to));
        }
    }
    if (changed) orient::apply_meek_rules(w.pdag(), w.orienter());
    return g;
}

DiscoveryResult discover(const LaggedDesignMatrix& design, const std::vector<std::string>& names,
                         const DiscoveryConfig& cfg, CiTester& tester) {
    DiscoveryResult res = skeleton_search(design, names, cfg, tester);
    res.graph = orient_stage3(std::move(res.graph), res.sepsets, &res.log);
    res.graph = orient_stage4(std::move(res.graph), design, cfg, &res.log);
    return res;
}

DiscoveryResult discover(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg) {
    cfg.validate();
    const LaggedDesignMatrix design = lag_embed(standardize(ds), cfg.max_lag);
    auto tester = make_tester(design, cfg.ci);
    DiscoveryResult res = discover(design, ds.names(), cfg, *tester);
    if (auto w = sample_size_warning(ds.rows(), ds.cols(), cfg.max_lag)) res.log.warnings.insert(res.log.warnings.begin(), *w);
    return res;
}

}  // namespace cdnots

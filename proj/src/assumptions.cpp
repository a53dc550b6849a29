#include "cdnots/assumptions.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <stdexcept>

#include "cdnots/kernels.hpp"

namespace cdnots {

std::vector<StationarityEntry> stationarity_report(const MixedGraph& g) {
    std::vector<StationarityEntry> out;
    for (int i = 0; i < g.n_vars(); ++i) {
        const bool ns = g.edge({LaggedNode::time(), LaggedNode::variable(i, 0)}).has_value();
        out.push_back({i, g.names()[static_cast<std::size_t>(i)], ns});
    }
    return out;
}

LinearityReport linearity_test(VectorRef y, VectorRef x, MatrixRef z, const LinearityConfig& cfg) {
    const Eigen::Index n = y.size();
    if (x.size() != n || (z.cols() > 0 && z.rows() != n)) throw std::invalid_argument("linearity: length mismatch");
    if (n < 10) throw std::invalid_argument("linearity: needs at least 10 samples");
    if (cfg.penalties.empty()) throw std::invalid_argument("linearity: no ridge penalties");

    const Eigen::VectorXd ys = kernels::zscore_columns(y).col(0);
    const Eigen::VectorXd xs = kernels::zscore_columns(x).col(0);
    Eigen::MatrixXd k = xs * xs.transpose();
    if (z.cols() > 0) k += kernels::rbf_gram(kernels::zscore_columns(z)).entries;
    k.diagonal().array() += cfg.jitter;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    if (eig.info() != Eigen::Success) throw std::runtime_error("linearity: kernel eigendecomposition failed");
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::VectorXd proj = v.transpose() * ys;

    // Fitted values and leave-one-out residuals r_i / (1 - H_ii) with
    // H = K (K + lambda I)^-1 = V diag(lam / (lam + lambda)) V'.
    double best_loo = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_resid;
    double best_penalty = 0.0;
    for (double pen : cfg.penalties) {
        const Eigen::VectorXd shrink = lam.array() / (lam.array() + pen);
        const Eigen::VectorXd fitted = v * shrink.cwiseProduct(proj);
        const Eigen::VectorXd h = v.array().square().matrix() * shrink;
        const Eigen::VectorXd resid = ys - fitted;
        const Eigen::VectorXd denom = (1.0 - h.array()).cwiseMax(1e-12);
        if (!resid.allFinite()) throw std::runtime_error("linearity: singular kernel system");
        const double loo = (resid.array() / denom.array()).square().mean();
        if (loo < best_loo) {
            best_loo = loo;
            best_resid = resid;
            best_penalty = pen;
        }
    }

    if (best_resid.size() == 0) throw std::runtime_error("linearity: singular kernel system");
    const CITestResult r = run_ci_test(cfg.ci, best_resid, xs, z, cfg.seed);
    LinearityReport rep;
    rep.p_value = r.p_value;
    rep.reject = r.p_value <= cfg.alpha;
    rep.test_name = r.test_name;
    rep.penalty = best_penalty;
    return rep;
}

}  // namespace cdnots

#include <cmath>
#include <stdexcept>

#include "cdnots/citest.hpp"
#include "cdnots/kernels.hpp"

namespace cdnots {

namespace {

Eigen::MatrixXd features(const Eigen::MatrixXd& points, int m, std::uint64_t seed) {
    const double sigma = kernels::median_heuristic_bandwidth(points);
    const auto map = kernels::sample_fourier_features(static_cast<int>(points.cols()), m, sigma, seed);
    return kernels::zscore_columns(kernels::apply_fourier_features(map, points));
}

Eigen::MatrixXd cross_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    // Columns are already centred.
    return a.transpose() * b / static_cast<double>(a.rows() - 1);
}

}  // namespace

CITestResult rcot_test(VectorRef x, VectorRef y, MatrixRef z, NullApprox approx, std::uint64_t seed,
                       const RcotConfig& cfg) {
    const Eigen::Index n = x.size();
    if (y.size() != n || (z.cols() > 0 && z.rows() != n)) throw std::invalid_argument("rcot: length mismatch");
    if (n < 10) throw std::invalid_argument("rcot: needs at least 10 samples");
    if (cfg.features_xy < 1 || cfg.features_z < 1) throw std::invalid_argument("rcot: feature counts must be positive");

    // x and y draw from the same stream so swapping them transposes the
    // cross-covariance and leaves the p-value unchanged.
    const Eigen::MatrixXd fx = features(kernels::zscore_columns(x), cfg.features_xy, seed);
    const Eigen::MatrixXd fy = features(kernels::zscore_columns(y), cfg.features_xy, seed);

    Eigen::MatrixXd cxy = cross_cov(fx, fy);
    Eigen::MatrixXd res_x = fx;
    Eigen::MatrixXd res_y = fy;
    if (z.cols() > 0) {
        const Eigen::MatrixXd fz = features(kernels::zscore_columns(z), cfg.features_z, seed);
        Eigen::MatrixXd czz = cross_cov(fz, fz);
        czz.diagonal().array() += 1e-10;
        const Eigen::MatrixXd czz_inv = czz.completeOrthogonalDecomposition().pseudoInverse();
        const Eigen::MatrixXd cxz = cross_cov(fx, fz);
        const Eigen::MatrixXd czy = cross_cov(fz, fy);
        const Eigen::MatrixXd z_czz_inv = fz * czz_inv;
        res_x -= z_czz_inv * cxz.transpose();
        res_y -= z_czz_inv * czy;
        cxy -= cxz * czz_inv * czy;
    }

    CITestResult res;
    res.n = n;
    res.cond_dim = static_cast<int>(z.cols());
    res.test_name = approx == NullApprox::Satterthwaite ? "rcot-sw" : "rcot-hbe";
    res.statistic = static_cast<double>(n) * cxy.squaredNorm();

    const Eigen::Index mx = res_x.cols();
    const Eigen::Index my = res_y.cols();
    Eigen::MatrixXd prod(n, mx * my);
    for (Eigen::Index i = 0; i < mx; ++i) {
        for (Eigen::Index j = 0; j < my; ++j) prod.col(i * my + j) = res_x.col(i).cwiseProduct(res_y.col(j));
    }
    Eigen::MatrixXd cov = prod.transpose() * prod / static_cast<double>(n);
    cov = 0.5 * (cov + cov.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("rcot: eigen-decomposition did not converge");
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (solver.eigenvalues()(i) > 0.0) ev.push_back(solver.eigenvalues()(i));
    }
    if (ev.empty()) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }
    const auto w = WeightVector::truncated(std::move(ev), 0.0);
    res.p_value = std::max(weighted_chisq_sf(w, res.statistic, approx), kMinPValue);
    return res;
}

}  // namespace cdnots

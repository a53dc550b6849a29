#include <cmath>
#include <stdexcept>

#include "cdnots/kernels.hpp"
#include "kcit_core.hpp"

namespace cdnots::kcit {

Eigen::MatrixXd centered_gram(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    Eigen::MatrixXd k = kernels::rbf_gram(points).entries;
    kernels::center_in_place(k);
    return k;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("kcit: eigen-decomposition did not converge");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

Eigen::MatrixXd ridge_residualizer(const Eigen::MatrixXd& centered_kz, double eps) {
    const Eigen::Index n = centered_kz.rows();
    Eigen::MatrixXd a = centered_kz;
    a.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw std::runtime_error("kcit: conditioning Gram is not positive definite");
    return eps * llt.solve(Eigen::MatrixXd::Identity(n, n));
}

namespace {

std::vector<double> positive_part(const std::vector<double>& ev, double rel_threshold) {
    double top = 0.0;
    for (double v : ev) top = std::max(top, v);
    std::vector<double> out;
    for (double v : ev) {
        if (v > 0.0 && v >= rel_threshold * top) out.push_back(v);
    }
    return out;
}

}  // namespace

CITestResult unconditional(const Eigen::MatrixXd& kx, const std::vector<double>& eig_x, const Eigen::MatrixXd& ky,
                           const std::vector<double>& eig_y, NullApprox approx, const KcitConfig& cfg) {
    const Eigen::Index n = kx.rows();
    const double nd = static_cast<double>(n);
    CITestResult res;
    res.n = n;
    res.cond_dim = 0;
    res.statistic = kx.cwiseProduct(ky).sum() / nd;

    const auto lx = positive_part(eig_x, cfg.eig_threshold);
    const auto ly = positive_part(eig_y, cfg.eig_threshold);
    if (lx.empty() || ly.empty()) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }
    std::vector<double> prod;
    prod.reserve(lx.size() * ly.size());
    for (double a : lx) {
        for (double b : ly) prod.push_back((a / nd) * (b / nd));
    }
    const auto w = WeightVector::truncated(std::move(prod), cfg.eig_threshold);
    res.p_value = std::max(weighted_chisq_sf(w, res.statistic, approx), kMinPValue);
    return res;
}

Eigen::MatrixXd residualize(const Eigen::MatrixXd& k, const Eigen::MatrixXd& rz) {
    Eigen::MatrixXd out = rz * (k * rz);
    return 0.5 * (out + out.transpose());
}

CITestResult conditional(const Eigen::MatrixXd& kx_r, const Eigen::MatrixXd& ky_r, int cond_dim, NullApprox approx) {
    CITestResult res;
    res.n = kx_r.rows();
    res.cond_dim = cond_dim;

    // The null weights are the eigenvalues of C = Kx|z o Ky|z; the moment
    // approximations need only tr C, tr C^2 and tr C^3.
    const Eigen::MatrixXd c = kx_r.cwiseProduct(ky_r);
    res.statistic = c.sum();
    WeightPowerSums sums;
    sums.s1 = c.trace();
    sums.s2 = c.squaredNorm();
    sums.s3 = (c * c).cwiseProduct(c).sum();
    if (!(sums.s1 > 0.0 && sums.s2 > 0.0 && sums.s3 > 0.0)) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }
    res.p_value = std::max(weighted_chisq_sf(sums, res.statistic, approx), kMinPValue);
    return res;
}

}  // namespace cdnots::kcit

namespace cdnots {

CITestResult kcit_test(VectorRef x, VectorRef y, MatrixRef z, NullApprox approx, const KcitConfig& cfg) {
    const Eigen::Index n = x.size();
    if (y.size() != n || (z.cols() > 0 && z.rows() != n)) throw std::invalid_argument("kcit: length mismatch");
    if (n < 10) throw std::invalid_argument("kcit: needs at least 10 samples");

    const Eigen::VectorXd xs = kernels::zscore_columns(x);
    const Eigen::VectorXd ys = kernels::zscore_columns(y);
    CITestResult res;
    if (z.cols() == 0) {
        const Eigen::MatrixXd kx = kcit::centered_gram(xs);
        const Eigen::MatrixXd ky = kcit::centered_gram(ys);
        res = kcit::unconditional(kx, kcit::symmetric_eigenvalues(kx), ky, kcit::symmetric_eigenvalues(ky), approx,
                                  cfg);
    } else {
        const Eigen::MatrixXd zs = kernels::zscore_columns(z);
        Eigen::MatrixXd xz(n, 1 + zs.cols());
        xz << xs, zs;
        Eigen::MatrixXd yz(n, 1 + zs.cols());
        yz << ys, zs;
        const Eigen::MatrixXd rz = kcit::ridge_residualizer(kcit::centered_gram(zs), cfg.ridge);
        res = kcit::conditional(kcit::residualize(kcit::centered_gram(xz), rz),
                                kcit::residualize(kcit::centered_gram(yz), rz), static_cast<int>(z.cols()), approx);
    }
    res.test_name = approx == NullApprox::Satterthwaite ? "kcit-sw" : "kcit-hbe";
    return res;
}

}  // namespace cdnots

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "cdnots/citest.hpp"

namespace cdnots {

namespace {

// Residual of v after least squares on [1, Z]; rank-deficient Z is handled by
// the complete orthogonal decomposition (minimum-norm solution).
Eigen::VectorXd residualize(const Eigen::VectorXd& v, const Eigen::MatrixXd& design,
                            const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>& cod) {
    if (design.cols() == 0) return v.array() - v.mean();
    return v - design * cod.solve(v);
}

}  // namespace

CITestResult parcorr_test(VectorRef x, VectorRef y, MatrixRef z) {
    const Eigen::Index n = x.size();
    const int cond_dim = static_cast<int>(z.cols());
    if (y.size() != n || (cond_dim > 0 && z.rows() != n)) throw std::invalid_argument("parcorr: length mismatch");
    if (n <= cond_dim + 3) throw std::invalid_argument("parcorr: need more samples than conditioning dimension + 3");

    CITestResult res;
    res.n = n;
    res.cond_dim = cond_dim;
    res.test_name = "parcorr";

    Eigen::MatrixXd design(n, cond_dim > 0 ? cond_dim + 1 : 0);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    if (cond_dim > 0) {
        design.col(0).setOnes();
        design.rightCols(cond_dim) = z;
        cod.compute(design);
    }
    const Eigen::VectorXd xv = x;
    const Eigen::VectorXd yv = y;
    const Eigen::VectorXd rx = residualize(xv, design, cod);
    const Eigen::VectorXd ry = residualize(yv, design, cod);

    const double var_x = (xv.array() - xv.mean()).square().sum();
    const double var_y = (yv.array() - yv.mean()).square().sum();
    const double rvx = rx.squaredNorm();
    const double rvy = ry.squaredNorm();
    constexpr double kRelTol = 1e-20;
    if (!(rvx > kRelTol * var_x) || !(rvy > kRelTol * var_y) || rvx == 0.0 || rvy == 0.0) {
        res.degenerate = true;
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }

    const double r = std::clamp(rx.dot(ry) / std::sqrt(rvx * rvy), -1.0, 1.0);
    res.statistic = r;
    const double df = static_cast<double>(n - cond_dim - 2);
    const double denom = 1.0 - r * r;
    if (denom <= 0.0) {
        res.p_value = kMinPValue;
        return res;
    }
    const double t = std::fabs(r) * std::sqrt(df / denom);
    const boost::math::students_t dist(df);
    res.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), kMinPValue, 1.0);
    return res;
}

}  // namespace cdnots

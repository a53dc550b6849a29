#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "cdnots/citest.hpp"
#include "cdnots/simd.hpp"

namespace cdnots {

namespace {

// Ranks 0..n-1, ties broken by index.
Eigen::VectorXd ranks(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const Eigen::Index n = v.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(order[static_cast<std::size_t>(i)]) = static_cast<double>(i);
    return r;
}

Eigen::MatrixXd rank_columns(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = ranks(m.col(c));
    return out;
}

int default_k(Eigen::Index n, int k) {
    if (k > 0) return k;
    return std::max(5, static_cast<int>(std::floor(0.1 * static_cast<double>(n))));
}

// Precomputed pieces of the estimator that do not depend on x, so the
// permutation loop only recomputes the x distances.
class CmiEstimator {
public:
    CmiEstimator(const Eigen::VectorXd& y_rank, const Eigen::MatrixXd& z_rank, int k)
        : n_(y_rank.size()), k_(k), y_(y_rank), dz_(n_, n_), dyz_(n_, n_), simd_(simd::active()) {
        const std::size_t n = static_cast<std::size_t>(n_);
        dz_.setZero();
        for (Eigen::Index i = 0; i < n_; ++i) {
            double* dz = dz_.col(i).data();
            for (Eigen::Index c = 0; c < z_rank.cols(); ++c) simd_.abs_diff_max(z_rank.col(c).data(), z_rank(i, c), dz, n);
            double* dyz = dyz_.col(i).data();
            std::copy_n(dz, n, dyz);
            simd_.abs_diff_max(y_.data(), y_(i), dyz, n);
        }
        has_z_ = z_rank.cols() > 0;
    }

    double estimate(const Eigen::VectorXd& x_rank) {
        const std::size_t n = static_cast<std::size_t>(n_);
        std::vector<double> dx(n);
        std::vector<double> dxz(n);
        std::vector<double> joint(n);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            std::fill(dx.begin(), dx.end(), 0.0);
            simd_.abs_diff_max(x_rank.data(), x_rank(i), dx.data(), n);
            const double* dz = dz_.col(i).data();
            const double* dyz = dyz_.col(i).data();
            simd_.elementwise_max(dx.data(), dz, dxz.data(), n);
            simd_.elementwise_max(dx.data(), dyz, joint.data(), n);
            const double eps = kth_distance(joint.data());
            const auto n_xz = simd_.count_less(dxz.data(), eps, n);
            const auto n_yz = simd_.count_less(dyz, eps, n);
            const auto n_z = has_z_ ? simd_.count_less(dz, eps, n) : n;
            acc += boost::math::digamma(static_cast<double>(n_xz)) + boost::math::digamma(static_cast<double>(n_yz)) -
                   boost::math::digamma(static_cast<double>(n_z));
        }
        return boost::math::digamma(static_cast<double>(k_)) - acc / static_cast<double>(n_);
    }

private:
    // Distances are maxima of rank differences, hence integers in [0, n);
    // the k-th neighbour distance (self excluded) is the smallest integer e
    // with at least k + 1 points at distance <= e.
    double kth_distance(const double* joint) const {
        const std::size_t n = static_cast<std::size_t>(n_);
        std::int64_t lo = 1;
        std::int64_t hi = n_ - 1;
        while (lo < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (simd_.count_less(joint, static_cast<double>(mid) + 0.5, n) >= static_cast<std::size_t>(k_) + 1) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return static_cast<double>(lo);
    }

    Eigen::Index n_;
    int k_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd dz_;
    Eigen::MatrixXd dyz_;
    bool has_z_ = false;
    const simd::KernelTable& simd_;
};

// For every sample, its k_perm nearest neighbours in Z (Chebyshev on ranks,
// self first, ties broken by index).
std::vector<std::vector<Eigen::Index>> z_neighbours(const Eigen::MatrixXd& z_rank, int k_perm) {
    const Eigen::Index n = z_rank.rows();
    const auto& simd = simd::active();
    std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(n));
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    const std::size_t keep = static_cast<std::size_t>(std::min<Eigen::Index>(k_perm, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::fill(d.begin(), d.end(), 0.0);
        for (Eigen::Index c = 0; c < z_rank.cols(); ++c) {
            simd.abs_diff_max(z_rank.col(c).data(), z_rank(i, c), d.data(), static_cast<std::size_t>(n));
        }
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        auto less = [&](Eigen::Index a, Eigen::Index b) {
            const double da = d[static_cast<std::size_t>(a)];
            const double db = d[static_cast<std::size_t>(b)];
            if (da != db) return da < db;
            if ((a == i) != (b == i)) return a == i;
            return a < b;
        };
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(), less);
        out[static_cast<std::size_t>(i)].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    return out;
}

}  // namespace

double cmi_knn_estimate(VectorRef x, VectorRef y, MatrixRef z, int k) {
    const Eigen::Index n = x.size();
    if (y.size() != n || (z.cols() > 0 && z.rows() != n)) throw std::invalid_argument("cmiknn: length mismatch");
    if (k < 1 || k >= n) throw std::invalid_argument("cmiknn: k must be in [1, n)");
    CmiEstimator est(ranks(y), rank_columns(z), k);
    return est.estimate(ranks(x));
}

CITestResult cmiknn_test(VectorRef x, VectorRef y, MatrixRef z, const CmiknnConfig& cfg, std::uint64_t seed) {
    const Eigen::Index n = x.size();
    if (y.size() != n || (z.cols() > 0 && z.rows() != n)) throw std::invalid_argument("cmiknn: length mismatch");
    const int k = default_k(n, cfg.k);
    if (k >= n) throw std::invalid_argument("cmiknn: k must be smaller than the sample size");
    if (n <= 2 * static_cast<Eigen::Index>(k) + 2) throw std::invalid_argument("cmiknn: needs n > 2k + 2");
    if (cfg.n_perm < 1 || cfg.k_perm < 1) throw std::invalid_argument("cmiknn: permutation settings must be positive");

    const Eigen::MatrixXd z_rank = rank_columns(z);
    const Eigen::VectorXd x_rank = ranks(x);
    CmiEstimator est(ranks(y), z_rank, k);
    const double observed = est.estimate(x_rank);

    std::mt19937_64 rng(seed);
    const auto neighbours = z.cols() > 0 ? z_neighbours(z_rank, cfg.k_perm) : std::vector<std::vector<Eigen::Index>>{};
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::vector<char> used(static_cast<std::size_t>(n));
    Eigen::VectorXd shuffled(n);
    int exceed = 0;
    for (int p = 0; p < cfg.n_perm; ++p) {
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        if (z.cols() == 0) {
            std::shuffle(perm.begin(), perm.end(), rng);
        } else {
            // Restricted shuffle: each sample takes the x of its nearest unused
            // Z-neighbour, or of its last listed neighbour when all are taken.
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            std::shuffle(order.begin(), order.end(), rng);
            std::fill(used.begin(), used.end(), 0);
            for (Eigen::Index i : order) {
                const auto& nb = neighbours[static_cast<std::size_t>(i)];
                std::size_t m = 0;
                while (m + 1 < nb.size() && used[static_cast<std::size_t>(nb[m])]) ++m;
                perm[static_cast<std::size_t>(i)] = nb[m];
                used[static_cast<std::size_t>(nb[m])] = 1;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) shuffled(i) = x_rank(perm[static_cast<std::size_t>(i)]);
        if (est.estimate(shuffled) >= observed) ++exceed;
    }

    CITestResult res;
    res.n = n;
    res.cond_dim = static_cast<int>(z.cols());
    res.test_name = "cmiknn";
    res.statistic = observed;
    res.p_value = std::max(static_cast<double>(1 + exceed) / static_cast<double>(cfg.n_perm + 1), kMinPValue);
    return res;
}

}  // namespace cdnots

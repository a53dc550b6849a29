#include "cdnots/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "cdnots/simd.hpp"

namespace cdnots::kernels {

namespace {

double median_of(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

double median_heuristic_bandwidth(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const Eigen::Index n = std::min(points.rows(), kMedianHeuristicRows);
    if (n < 2) throw std::invalid_argument("median heuristic needs at least two points");
    const auto& simd = simd::active();
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    std::vector<double> acc(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const std::size_t len = static_cast<std::size_t>(n - i - 1);
        std::fill_n(acc.begin(), len, 0.0);
        for (Eigen::Index k = 0; k < points.cols(); ++k) {
            simd.sq_dist_accumulate(points.col(k).data() + i + 1, points(i, k), acc.data(), len);
        }
        for (std::size_t j = 0; j < len; ++j) dist.push_back(std::sqrt(acc[j]));
    }
    double med = median_of(dist);
    if (med > 0.0) return med;
    // Heavy ties: fall back to the median over distinct pairs.
    std::erase_if(dist, [](double d) { return d <= 0.0; });
    if (dist.empty()) throw std::invalid_argument("median heuristic: all points are identical");
    return median_of(dist);
}

Eigen::MatrixXd pairwise_sq_distances(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const Eigen::Index n = points.rows();
    const auto& simd = simd::active();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double* col = d.col(i).data();
        const std::size_t len = static_cast<std::size_t>(n - i);
        for (Eigen::Index k = 0; k < points.cols(); ++k) {
            simd.sq_dist_accumulate(points.col(k).data() + i, points(i, k), col + i, len);
        }
    }
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) d(i, j) = d(j, i);
    }
    return d;
}

GramMatrix rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& points, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("rbf_gram: bandwidth must be positive");
    Eigen::MatrixXd k = pairwise_sq_distances(points);
    const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
    k = (-scale * k.array()).exp().matrix();
    return {std::move(k), bandwidth};
}

GramMatrix rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    return rbf_gram(points, median_heuristic_bandwidth(points));
}

void center_in_place(Eigen::MatrixXd& k) {
    const Eigen::VectorXd col_means = k.colwise().mean().transpose();
    const Eigen::VectorXd row_means = k.rowwise().mean();
    const double grand = col_means.mean();
    k.colwise() -= row_means;
    k.rowwise() -= col_means.transpose();
    k.array() += grand;
}

GramMatrix center_gram(const GramMatrix& k) {
    GramMatrix out = k;
    center_in_place(out.entries);
    return out;
}

FourierFeatureMap sample_fourier_features(int d, int m, double bandwidth, std::uint64_t seed) {
    if (d < 1 || m < 1) throw std::invalid_argument("fourier features: dimensions must be positive");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("fourier features: bandwidth must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / bandwidth);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    FourierFeatureMap map;
    map.frequencies.resize(m, d);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) map.frequencies(i, j) = normal(rng);
    }
    map.phases.resize(m);
    for (int i = 0; i < m; ++i) map.phases(i) = uniform(rng);
    map.scale = std::sqrt(2.0 / m);
    return map;
}

Eigen::MatrixXd apply_fourier_features(const FourierFeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points) {
    if (points.cols() != map.frequencies.cols()) throw std::invalid_argument("fourier features: dimension mismatch");
    Eigen::MatrixXd proj = points * map.frequencies.transpose();
    proj.rowwise() += map.phases.transpose();
    return map.scale * proj.array().cos().matrix();
}

Eigen::MatrixXd zscore_columns(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    Eigen::MatrixXd z = m;
    const double n = static_cast<double>(z.rows());
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        z.col(c).array() -= z.col(c).mean();
        const double sd = std::sqrt(z.col(c).squaredNorm() / n);
        if (sd > 0.0) z.col(c) /= sd;
    }
    return z;
}

}  // namespace cdnots::kernels

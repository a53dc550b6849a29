#pragma once

// RBF kernel primitives shared by KCIT, RCoT and the linearity diagnostic.
//
// Convention: k(x, y) = exp(-|x - y|^2 / (2 sigma^2)), sigma from the median
// heuristic over at most the first 500 rows.

#include <Eigen/Dense>

#include <cstdint>

namespace cdnots::kernels {

inline constexpr Eigen::Index kMedianHeuristicRows = 500;

struct GramMatrix {
    Eigen::MatrixXd entries;
    double bandwidth = 1.0;
};

struct FourierFeatureMap {
    Eigen::MatrixXd frequencies;  // m x d
    Eigen::VectorXd phases;       // m, uniform on [0, 2 pi)
    double scale = 1.0;           // sqrt(2 / m)
};

// Median pairwise Euclidean distance among the leading min(n, 500) rows.
// Throws std::invalid_argument if those rows are all identical.
double median_heuristic_bandwidth(const Eigen::Ref<const Eigen::MatrixXd>& points);

// Full n x n matrix of squared Euclidean distances between rows.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::Ref<const Eigen::MatrixXd>& points);

GramMatrix rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& points, double bandwidth);

// rbf_gram with the median-heuristic bandwidth.
GramMatrix rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& points);

// H K H with H = I - 11'/n.
GramMatrix center_gram(const GramMatrix& k);
void center_in_place(Eigen::MatrixXd& k);

FourierFeatureMap sample_fourier_features(int d, int m, double bandwidth, std::uint64_t seed);

// n x m matrix of scale * cos(w_i' x + b_i).
Eigen::MatrixXd apply_fourier_features(const FourierFeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points);

// Column-wise z-scoring (population sd). Constant columns are centred only.
Eigen::MatrixXd zscore_columns(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace cdnots::kernels

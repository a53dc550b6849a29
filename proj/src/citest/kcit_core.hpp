#pragma once

// Building blocks shared by kcit_test and the caching design-matrix tester.

#include <Eigen/Dense>

#include <vector>

#include "cdnots/citest.hpp"

namespace cdnots::kcit {

// Centred RBF Gram of already z-scored points, median-heuristic bandwidth.
Eigen::MatrixXd centered_gram(const Eigen::Ref<const Eigen::MatrixXd>& points);

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m);

// eps * (Kz + eps I)^{-1}
Eigen::MatrixXd ridge_residualizer(const Eigen::MatrixXd& centered_kz, double eps);

CITestResult unconditional(const Eigen::MatrixXd& kx, const std::vector<double>& eig_x, const Eigen::MatrixXd& ky,
                           const std::vector<double>& eig_y, NullApprox approx, const KcitConfig& cfg);

// Rz K Rz
Eigen::MatrixXd residualize(const Eigen::MatrixXd& k, const Eigen::MatrixXd& rz);

// Takes the residualised Grams of (x, Z) and (y, Z).
CITestResult conditional(const Eigen::MatrixXd& kx_r, const Eigen::MatrixXd& ky_r, int cond_dim, NullApprox approx);

}  // namespace cdnots::kcit

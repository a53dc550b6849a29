#pragma once

// Conditional-independence tests: partial correlation, KCIT, RCoT and
// CMIknn, plus the moment-matching approximations to the weighted
// chi-square null law used by the two kernel tests.
//
// All tests z-score their inputs. A Z argument with zero columns means an
// unconditional test. p-values are floored at 1e-300.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdnots/dataset.hpp"
#include "cdnots/node.hpp"

namespace cdnots {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

inline constexpr double kMinPValue = 1e-300;

struct CITestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Eigen::Index n = 0;
    int cond_dim = 0;
    std::string test_name;
    bool degenerate = false;
};

// Nonincreasing, nonnegative, at least one positive entry.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> weights);

    // Sorts descending, drops entries below rel_threshold * max.
    static WeightVector truncated(std::vector<double> values, double rel_threshold);

    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

enum class NullApprox { Satterthwaite, HallBuckleyEagleson };

// Survival function P(sum_i w_i chi2_1 > t): two-cumulant scaled chi-square.
double weighted_chisq_sf_sw(const WeightVector& w, double t);
// Survival function via a three-cumulant shifted/scaled chi-square.
double weighted_chisq_sf_hbe(const WeightVector& w, double t);
double weighted_chisq_sf(const WeightVector& w, double t, NullApprox approx);

// Both approximations only see sum w, sum w^2 and sum w^3.
struct WeightPowerSums {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
};
WeightPowerSums power_sums(const WeightVector& w);
double weighted_chisq_sf(const WeightPowerSums& sums, double t, NullApprox approx);

CITestResult parcorr_test(VectorRef x, VectorRef y, MatrixRef z);

struct KcitConfig {
    double ridge = 1e-3;
    double eig_threshold = 1e-5;
};

CITestResult kcit_test(VectorRef x, VectorRef y, MatrixRef z, NullApprox approx, const KcitConfig& cfg = {});

struct RcotConfig {
    int features_z = 25;
    int features_xy = 5;
};

CITestResult rcot_test(VectorRef x, VectorRef y, MatrixRef z, NullApprox approx, std::uint64_t seed,
                       const RcotConfig& cfg = {});

struct CmiknnConfig {
    int k = 0;  // 0: max(5, floor(0.1 n))
    int n_perm = 200;
    int k_perm = 5;
};

// k-NN conditional mutual information on rank-transformed data.
double cmi_knn_estimate(VectorRef x, VectorRef y, MatrixRef z, int k);

CITestResult cmiknn_test(VectorRef x, VectorRef y, MatrixRef z, const CmiknnConfig& cfg, std::uint64_t seed);

enum class CiTestKind { ParCorr, KcitSw, KcitHbe, RcotSw, RcotHbe, CmiKnn };

inline constexpr CiTestKind kAllCiTests[] = {CiTestKind::ParCorr, CiTestKind::KcitSw,  CiTestKind::KcitHbe,
                                             CiTestKind::RcotSw,  CiTestKind::RcotHbe, CiTestKind::CmiKnn};

// "parcorr", "kcit-sw", "kcit-hbe", "rcot-sw", "rcot-hbe", "cmiknn".
std::string_view ci_test_name(CiTestKind kind);
CiTestKind parse_ci_test(std::string_view name);
bool is_randomized(CiTestKind kind);

struct CiTestConfig {
    CiTestKind kind = CiTestKind::ParCorr;
    KcitConfig kcit;
    RcotConfig rcot;
    CmiknnConfig cmiknn;
};

CITestResult run_ci_test(const CiTestConfig& cfg, VectorRef x, VectorRef y, MatrixRef z, std::uint64_t seed);

// A CI test bound to the columns of a design matrix. Implementations may
// cache per-column work; results equal run_ci_test on the gathered columns.
// test() is safe to call concurrently.
class CiTester {
public:
    virtual ~CiTester() = default;
    virtual CITestResult test(const LaggedNode& a, const LaggedNode& b, std::span<const LaggedNode> cond,
                              std::uint64_t seed) = 0;
    virtual std::string_view name() const = 0;
};

std::unique_ptr<CiTester> make_tester(const LaggedDesignMatrix& design, const CiTestConfig& cfg);

}  // namespace cdnots

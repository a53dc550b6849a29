#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "cdnots/citest.hpp"

namespace cdnots {

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
    bool any_positive = false;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
            throw std::invalid_argument("weight vector: weights must be finite and nonnegative");
        }
        if (i > 0 && weights_[i] > weights_[i - 1]) throw std::invalid_argument("weight vector: must be nonincreasing");
        any_positive = any_positive || weights_[i] > 0.0;
    }
    if (!any_positive) throw std::invalid_argument("weight vector: needs at least one positive weight");
}

WeightVector WeightVector::truncated(std::vector<double> values, double rel_threshold) {
    std::sort(values.begin(), values.end(), std::greater<>());
    if (values.empty() || !(values.front() > 0.0)) {
        throw std::runtime_error("null weights: no positive eigenvalue");
    }
    const double cut = values.front() * rel_threshold;
    std::erase_if(values, [cut](double v) { return !(v >= cut); });
    return WeightVector(std::move(values));
}

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

WeightPowerSums power_sums(const WeightVector& w) {
    WeightPowerSums c;
    for (double v : w.weights()) {
        c.s1 += v;
        c.s2 += v * v;
        c.s3 += v * v * v;
    }
    return c;
}

namespace {

double sf_sw(const WeightPowerSums& c, double t) {
    if (t < 0.0) return 1.0;
    // a * chi2_d with matching mean and variance
    const double a = c.s2 / c.s1;
    const double d = c.s1 * c.s1 / c.s2;
    return clamp01(boost::math::gamma_q(0.5 * d, t / (2.0 * a)));
}

double sf_hbe(const WeightPowerSums& c, double t) {
    if (t < 0.0) return 1.0;
    const double k1 = c.s1;
    const double k2 = 2.0 * c.s2;
    const double k3 = 8.0 * c.s3;
    const double nu = 8.0 * k2 * k2 * k2 / (k3 * k3);
    const double shifted = std::sqrt(2.0 * nu / k2) * (t - k1) + nu;
    if (shifted <= 0.0) return 1.0;
    return clamp01(boost::math::gamma_q(0.5 * nu, 0.5 * shifted));
}

}  // namespace

double weighted_chisq_sf_sw(const WeightVector& w, double t) { return sf_sw(power_sums(w), t); }

double weighted_chisq_sf_hbe(const WeightVector& w, double t) { return sf_hbe(power_sums(w), t); }

double weighted_chisq_sf(const WeightVector& w, double t, NullApprox approx) {
    return weighted_chisq_sf(power_sums(w), t, approx);
}

double weighted_chisq_sf(const WeightPowerSums& sums, double t, NullApprox approx) {
    if (!(sums.s1 > 0.0 && sums.s2 > 0.0 && sums.s3 > 0.0)) throw std::invalid_argument("weighted chi-square: weights must have positive power sums");
    return approx == NullApprox::Satterthwaite ? sf_sw(sums, t) : sf_hbe(sums, t);
}

}  // namespace cdnots

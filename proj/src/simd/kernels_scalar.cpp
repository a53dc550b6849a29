#include "cdnots/simd.hpp"

#include <cmath>

namespace cdnots::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[j] * b[j];
    return s;
}

void sq_dist_accumulate_scalar(const double* col, double center, double* acc, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        const double d = col[j] - center;
        acc[j] += d * d;
    }
}

void abs_diff_max_scalar(const double* col, double center, double* acc, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::fabs(col[j] - center);
        if (d > acc[j]) acc[j] = d;
    }
}

void elementwise_max_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j] > b[j] ? a[j] : b[j];
}

std::size_t count_less_scalar(const double* v, double threshold, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) c += v[j] < threshold ? 1 : 0;
    return c;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::Scalar,
                                   dot_scalar,
                                   sq_dist_accumulate_scalar,
                                   abs_diff_max_scalar,
                                   elementwise_max_scalar,
                                   count_less_scalar};
    return table;
}

}  // namespace cdnots::simd

// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include "cdnots/simd.hpp"

#include <immintrin.h>

#include <cmath>

namespace cdnots::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), s1);
    }
    for (; j + 4 <= n; j += 4) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), s0);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; j < n; ++j) s += a[j] * b[j];
    return s;
}

void sq_dist_accumulate(const double* col, double center, double* acc, std::size_t n) {
    const __m256d c = _mm256_set1_pd(center);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(col + j), c);
        _mm256_storeu_pd(acc + j, _mm256_fmadd_pd(d, d, _mm256_loadu_pd(acc + j)));
    }
    for (; j < n; ++j) {
        const double d = col[j] - center;
        acc[j] += d * d;
    }
}

void abs_diff_max(const double* col, double center, double* acc, std::size_t n) {
    const __m256d c = _mm256_set1_pd(center);
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d d = _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(col + j), c), abs_mask);
        _mm256_storeu_pd(acc + j, _mm256_max_pd(d, _mm256_loadu_pd(acc + j)));
    }
    for (; j < n; ++j) {
        const double d = std::fabs(col[j] - center);
        if (d > acc[j]) acc[j] = d;
    }
}

void elementwise_max(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        // max_pd(a, b) yields b on ties and NaN, as a > b ? a : b does
        _mm256_storeu_pd(out + j, _mm256_max_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
    }
    for (; j < n; ++j) out[j] = a[j] > b[j] ? a[j] : b[j];
}

std::size_t count_less(const double* v, double threshold, std::size_t n) {
    const __m256d t = _mm256_set1_pd(threshold);
    std::size_t c = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(v + j), t, _CMP_LT_OQ));
        c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; j < n; ++j) c += v[j] < threshold ? 1 : 0;
    return c;
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{Isa::Avx2, dot, sq_dist_accumulate, abs_diff_max, elementwise_max, count_less};
    return t;
}

}  // namespace cdnots::simd::avx2

#pragma once

// Data-parallel inner loops shared by the kernel and nearest-neighbour code.
//
// Every kernel exists as a portable scalar reference and, on x86-64, as an
// AVX2/FMA variant. The variant is picked once at runtime from CPUID; the
// environment variable CDNOTS_SIMD=scalar|avx2 overrides the choice.

#include <cstddef>
#include <string_view>

namespace cdnots::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    // sum_j a[j] * b[j]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // acc[j] += (col[j] - center)^2
    void (*sq_dist_accumulate)(const double* col, double center, double* acc, std::size_t n);
    // acc[j] = max(acc[j], |col[j] - center|)
    void (*abs_diff_max)(const double* col, double center, double* acc, std::size_t n);
    // out[j] = max(a[j], b[j])
    void (*elementwise_max)(const double* a, const double* b, double* out, std::size_t n);
    // #{j : v[j] < threshold}
    std::size_t (*count_less)(const double* v, double threshold, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();

// The table used by the library. Resolved on first call.
const KernelTable& active();

std::string_view isa_name(Isa isa);

}  // namespace cdnots::simd

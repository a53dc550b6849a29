#include "cdnots/simd.hpp"

#include <cstdlib>
#include <string>

namespace cdnots::simd {

#ifdef CDNOTS_HAVE_AVX2_KERNELS
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_kernels() {
#ifdef CDNOTS_HAVE_AVX2_KERNELS
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return supported ? &avx2::table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& chosen = []() -> const KernelTable& {
        const char* env = std::getenv("CDNOTS_SIMD");
        const std::string want = env ? env : "";
        if (want == "scalar") return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return chosen;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace cdnots::simd

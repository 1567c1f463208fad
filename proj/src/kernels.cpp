#include "vsr/kernels.hpp"
#include <cstdlib>
#include <cstring>

namespace vsr::kern {

static void axpy_s(double* y, const double* x, std::size_t n, double c) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}
static void scale_s(double* y, std::size_t n, double c) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= c;
}
static double dot_s(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

const Ops& scalar_ops() {
    static const Ops o{axpy_s, scale_s, dot_s, "scalar"};
    return o;
}

#ifndef VSR_HAVE_AVX2_KERNELS
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& ops() {
    static const Ops* sel = [] {
        const char* env = std::getenv("VSR_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
        if (const Ops* a = avx2_ops(); a && __builtin_cpu_supports("avx2")
                                         && __builtin_cpu_supports("fma"))
            return a;
#endif
        return &scalar_ops();
    }();
    return *sel;
}

} // namespace vsr::kern

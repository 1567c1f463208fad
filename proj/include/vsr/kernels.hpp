#pragma once
#include <cstddef>

// Hot inner loops of the transform engine: y += c*x, dot, scale.
// A scalar reference build is always present; an AVX2+FMA build is
// linked in on x86_64 and picked at runtime (override: VSR_SIMD=scalar).
namespace vsr::kern {

struct Ops {
    void (*axpy)(double* y, const double* x, std::size_t n, double c);
    void (*scale)(double* y, std::size_t n, double c);
    double (*dot)(const double* a, const double* b, std::size_t n);
    const char* name;
};

const Ops& scalar_ops();
const Ops* avx2_ops();   // nullptr when unavailable
const Ops& ops();        // runtime selection, cached

} // namespace vsr::kern

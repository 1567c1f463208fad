#include "vsr/kernels.hpp"
#include <immintrin.h>

namespace vsr::kern {

static void axpy_v(double* y, const double* x, std::size_t n, double c) {
    __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i), y0);
        y1 = _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i + 4), y1);
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        y0 = _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i), y0);
        _mm256_storeu_pd(y + i, y0);
    }
    for (; i < n; ++i) y[i] += c * x[i];
}

static void scale_v(double* y, std::size_t n, double c) {
    __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(vc, _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] *= c;
}

static double dot_v(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    s0 = _mm256_add_pd(s0, s1);
    double buf[4];
    _mm256_storeu_pd(buf, s0);
    double s = buf[0] + buf[1] + buf[2] + buf[3];
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

const Ops* avx2_ops() {
    static const Ops o{axpy_v, scale_v, dot_v, "avx2"};
    return &o;
}

} // namespace vsr::kern

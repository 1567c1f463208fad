#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsr/kernels.hpp"

#include <random>
#include <vector>

using namespace vsr;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// reference dot with extended accumulation, used as the accuracy yardstick
long double dot_ld(const double* a, const double* b, std::size_t n) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += (long double)a[i] * b[i];
    return s;
}

} // namespace

TEST_CASE("scalar kernels match straightforward loops") {
    std::mt19937_64 rng(1);
    const auto& sc = kern::scalar_ops();
    for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(7),
                          std::size_t(64), std::size_t(1000)}) {
        auto x = random_vec(n, rng), y = random_vec(n, rng);
        auto y2 = y;
        double c = 0.37;
        sc.axpy(y.data(), x.data(), n, c);
        for (std::size_t i = 0; i < n; ++i) y2[i] += c * x[i];
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        auto z = random_vec(n, rng);
        auto z2 = z;
        sc.scale(z.data(), n, -1.25);
        for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == -1.25 * z2[i]);

        double d = sc.dot(x.data(), y.data(), n);
        CHECK(d == doctest::Approx((double)dot_ld(x.data(), y.data(), n)).epsilon(1e-12));
    }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const kern::Ops* vx = kern::avx2_ops();
    if (!vx) return; // machine without AVX2: nothing to compare
    const auto& sc = kern::scalar_ops();
    std::mt19937_64 rng(2);
    // odd lengths exercise the tail loops
    for (std::size_t n = 0; n < 67; ++n) {
        auto x = random_vec(n, rng), y = random_vec(n, rng);
        auto ys = y, yv = y;
        sc.axpy(ys.data(), x.data(), n, 0.731);
        vx->axpy(yv.data(), x.data(), n, 0.731);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-13));

        auto zs = x, zv = x;
        sc.scale(zs.data(), n, 3.0);
        vx->scale(zv.data(), n, 3.0);
        for (std::size_t i = 0; i < n; ++i) CHECK(zv[i] == zs[i]);

        double ref = (double)dot_ld(x.data(), y.data(), n);
        CHECK(vx->dot(x.data(), y.data(), n) == doctest::Approx(ref).epsilon(1e-12));
    }
    // one long run to catch accumulation-order bugs
    std::size_t n = 100003;
    auto x = random_vec(n, rng), y = random_vec(n, rng);
    double ref = (double)dot_ld(x.data(), y.data(), n);
    CHECK(vx->dot(x.data(), y.data(), n) == doctest::Approx(ref).epsilon(1e-11));
    CHECK(sc.dot(x.data(), y.data(), n) == doctest::Approx(ref).epsilon(1e-11));
}

TEST_CASE("runtime selection yields a working implementation") {
    const auto& o = kern::ops();
    CHECK(o.name != nullptr);
    double a[3] = {1, 2, 3}, b[3] = {4, 5, 6};
    CHECK(o.dot(a, b, 3) == doctest::Approx(32.0));
    o.axpy(a, b, 3, 2.0);
    CHECK(a[0] == doctest::Approx(9.0));
    CHECK(a[2] == doctest::Approx(15.0));
}

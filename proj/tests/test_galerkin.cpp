#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsr/galerkin.hpp"
#include "vsr/spectral.hpp"

#include <cmath>
#include <random>

using namespace vsr;

namespace {

constexpr double PI = 3.14159265358979323846;

std::mt19937_64 rng(31);

GalerkinState random_state(const TensorBasis& b, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    GalerkinState s;
    s.x.resize(b.n_sym());
    s.y.resize(b.n_skew());
    for (double& v : s.x) v = u(rng);
    for (double& v : s.y) v = u(rng);
    return s;
}

double quad_inner(const TensorField& A, const TensorField& B) {
    double h = PI / (A.N + 1);
    double s = 0;
    for (std::size_t i = 0; i < A.data.size(); ++i) s += A.data[i] * B.data[i];
    return s * h * h * h;
}

} // namespace

TEST_CASE("parameter validation rejects bad setups") {
    ModelParams p;
    p.prox = {0.5, 0.1, 0.1};
    CHECK_NOTHROW(p.validate());

    ModelParams q = p;
    q.M_s = 0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p; q.N = 3;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p; q.dt = 0.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p; q.t_end = -1.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p; q.sample_every = 0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p; q.prox.lambda = 1.5;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p; q.w0_modes = {{99, 0.1}};
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    // cutoff beyond the grid
    q = p; q.M_s = 20; q.N = 2; // N check fires first, so use N = 4 below
    q.N = 4; q.M_s = 80;        // needs wavenumbers > 4
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    // dealiasing must not eat retained modes
    q = p; q.M_s = 20; q.N = 4; q.dealias = false;
    CHECK_NOTHROW(q.validate());
    q.dealias = true;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    // prescribed forcing of the wrong shape
    q = p;
    q.wext_field = std::make_shared<TensorField>(q.N + 2, 2, Rep::nodal);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("synthesis round-trips through quadrature projection") {
    int N = 10, M_s = 4;
    TensorBasis b = assemble_basis(M_s);
    GalerkinState s = random_state(b, 0.3);
    SynthFields f = synth_fields(s, b, N);

    // subtract the identity to recover the pure deviation field
    TensorField Wdev = f.W;
    for (int d = 0; d < 3; ++d) {
        double* c = Wdev.comp(4 * d);
        for (std::size_t i = 0; i < Wdev.n3(); ++i) c[i] -= 1.0;
    }
    for (int i = 0; i < b.n_sym(); ++i) {
        TensorField E = b.sym_mode_field(i, N, Rep::nodal);
        CHECK(quad_inner(Wdev, E) == doctest::Approx(s.x[i]).epsilon(1e-11));
    }
    for (int j = 0; j < b.n_skew(); ++j) {
        TensorField E = b.skew_mode_field(j, N, Rep::nodal);
        CHECK(quad_inner(f.Theta, E) == doctest::Approx(s.y[j]).epsilon(1e-11));
    }
    // R is the pointwise exponential of Theta
    for (std::size_t n = 0; n < f.R.n3(); n += 37) {
        Mat3 T = f.Theta.mat_at(n);
        SkewMat3 th{{-T(1, 2), T(0, 2), -T(0, 1)}};
        Mat3 R = exp_skew(th);
        Mat3 got = f.R.mat_at(n);
        for (int c = 0; c < 9; ++c)
            CHECK(got.m[c] == doctest::Approx(R.m[c]).epsilon(1e-13));
    }
}

TEST_CASE("initial state honors the seed modes and the admissible set") {
    ModelParams p;
    p.prox = {0.5, 0.1, 0.1};
    p.M_s = 2;
    p.N = 8;
    p.w0_modes = {{0, 0.1}, {7, -0.05}, {0, 0.02}};
    System sys(p);
    GalerkinState s = sys.initial_state();
    CHECK(s.x[0] == doctest::Approx(0.12));
    CHECK(s.x[7] == doctest::Approx(-0.05));
    CHECK(s.x[1] == 0.0);
    for (double v : s.y) CHECK(v == 0.0);

    p.w0_modes = {{0, -2.0}}; // drives an eigenvalue of W0 below alpha
    System sys2(p);
    CHECK_THROWS_AS(sys2.initial_state(), std::invalid_argument);
}

TEST_CASE("rhs matches a straightforward spectral-operator assembly") {
    ModelParams p;
    p.prox = {0.3, 0.2, 0.1};
    p.M_s = 2;
    p.N = 8;
    p.wext.kind = ForceKind::linear_spring;
    p.wext.gain = 0.15;
    p.oext.kind = ForceKind::linear_spring;
    p.oext.gain = -0.1;
    System sys(p);
    const TensorBasis& b = sys.basis();
    GalerkinState s = random_state(b, 0.15);
    s.t = 0.4;

    std::vector<double> dx, dy;
    sys.rhs(s, s.t, dx, dy);

    // oracle: same model, assembled from the public field operators
    SynthFields f = synth_fields(s, b, p.N);
    const std::size_t n = f.W.n3();
    TensorField Fdev(p.N, 2, Rep::nodal);
    const Mat3 I = Mat3::identity();
    for (std::size_t i = 0; i < n; ++i)
        Fdev.set_mat(i, f.R.mat_at(i) * f.W.mat_at(i) - I);
    LerayResult lr = leray_inv_laplacian(curl_rows(Fdev, Rep::modal), LerayMode::plain);
    TensorField curlZ = curl_rows(lr.Z, Rep::nodal);
    TensorField Sigma(p.N, 2, Rep::nodal);
    for (std::size_t i = 0; i < n; ++i)
        Sigma.set_mat(i, psiD_yosida(curlZ.mat_at(i), p.prox));
    // the stress force applies the transpose of the curl/propagator chain so
    // it is the exact gradient of the quadrature dissipation energy
    TensorField V = inv_laplacian_dirichlet(curl_rows_adjoint(Sigma), Rep::modal);
    TensorField K = curl_rows_adjoint(V, Rep::nodal);

    double cw = p.wext.factor(s.t), co = p.oext.factor(s.t);
    TensorField Gs(p.N, 2, Rep::nodal), Ga(p.N, 2, Rep::nodal);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 W = f.W.mat_at(i);
        Mat3 R = f.R.mat_at(i);
        SymMat3 Ws = sym_skew_split(W).first;
        Mat3 chi = chi_yosida(Ws, p.prox).full();
        Mat3 sym_f = chi * -1.0 + sym_part(W - I) * cw -
                     sym_part(R.transpose() * K.mat_at(i));
        Mat3 skew_f = f.Theta.mat_at(i) * co -
                      skew_part(K.mat_at(i) * W * R.transpose());
        Gs.set_mat(i, sym_f);
        Ga.set_mat(i, skew_f);
    }
    for (int i = 0; i < b.n_sym(); ++i) {
        TensorField E = b.sym_mode_field(i, p.N, Rep::nodal);
        double want = -(1.0 + b.gamma_sym(i)) * s.x[i] + quad_inner(Gs, E);
        CHECK(dx[i] == doctest::Approx(want).epsilon(1e-9));
    }
    for (int j = 0; j < b.n_skew(); ++j) {
        TensorField E = b.skew_mode_field(j, p.N, Rep::nodal);
        double want = -s.y[j] + (2.0 / b.gamma_skew(j)) * quad_inner(Ga, E);
        CHECK(dy[j] == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("rest state is an exact equilibrium") {
    ModelParams p;
    p.prox = {0.5, 0.1, 0.1};
    p.M_s = 3;
    p.N = 8;
    p.t_end = 0.05;
    p.dt = 1e-2;
    p.sample_every = 1;
    System sys(p);
    RunRecord rec = sys.run();
    for (const auto& smp : rec.samples) {
        CHECK(smp.wdev_l2 == 0.0);
        CHECK(smp.theta_l2 == 0.0);
        CHECK(smp.energy == 0.0);
        CHECK(smp.residual == 0.0);
    }
}

TEST_CASE("stretch rhs is the gradient of the quadrature energies") {
    // with no forcing, dx_i + (1 + gamma_i) x_i must equal minus the partial
    // derivative of the smoothed constraint + dislocation energies in x_i
    // (at fixed rotation); checked by central finite differences
    ModelParams p;
    p.prox = {0.2, 0.15, 0.1};
    p.M_s = 2;
    p.N = 8;
    System sys(p);
    const TensorBasis& b = sys.basis();
    GalerkinState s = random_state(b, 0.15);

    std::vector<double> dx, dy;
    RhsAux aux;
    sys.rhs(s, 0.0, dx, dy, &aux);
    const double fd = 1e-5;
    for (int i = 0; i < b.n_sym(); i += 5) {
        GalerkinState sp = s, sm = s;
        sp.x[i] += fd;
        sm.x[i] -= fd;
        std::vector<double> tx, ty;
        RhsAux ap, am;
        sys.rhs(sp, 0.0, tx, ty, &ap);
        sys.rhs(sm, 0.0, tx, ty, &am);
        double grad = (ap.psihat_env + ap.psiD_env - am.psihat_env - am.psiD_env) /
                      (2 * fd);
        double got = dx[i] + (1.0 + b.gamma_sym(i)) * s.x[i];
        CHECK(got == doctest::Approx(-grad).epsilon(1e-7).scale(1e-3));
    }
}

TEST_CASE("one step from rest under constant forcing is exact") {
    // at the rest state every internal term vanishes, so the first step sees
    // a constant inhomogeneity and the integrating factor integrates it
    // exactly
    ModelParams p;
    p.prox = {0.3, 0.1, 0.1};
    p.M_s = 2;
    p.N = 8;
    p.dt = 0.05;
    System sys0(p);
    const TensorBasis& b = sys0.basis();
    auto wf = std::make_shared<TensorField>(b.sym_mode_field(3, p.N, Rep::nodal));
    for (double& v : wf->data) v *= 0.7;
    auto of = std::make_shared<TensorField>(b.skew_mode_field(4, p.N, Rep::nodal));
    for (double& v : of->data) v *= -0.4;
    p.wext_field = wf;
    p.oext_field = of;
    System sys(p);
    GalerkinState s1 = sys.step(sys.initial_state(), p.dt);
    double a = 1.0 + b.gamma_sym(3);
    CHECK(s1.x[3] ==
          doctest::Approx(0.7 * (1.0 - std::exp(-a * p.dt)) / a).epsilon(1e-13));
    double py = -0.8 / b.gamma_skew(4);
    CHECK(s1.y[4] == doctest::Approx(py * (1.0 - std::exp(-p.dt))).epsilon(1e-13));
    for (int i = 0; i < b.n_sym(); ++i)
        if (i != 3) CHECK(std::abs(s1.x[i]) < 1e-14);
    for (int j = 0; j < b.n_skew(); ++j)
        if (j != 4) CHECK(std::abs(s1.y[j]) < 1e-14);
}

TEST_CASE("time stepping converges at the advertised orders") {
    ModelParams p;
    p.prox = {0.0, 0.2, 0.1};
    p.M_s = 2;
    p.N = 8;
    p.t_end = 0.2;
    p.w0_modes = {{0, 0.2}, {4, -0.1}};
    p.sample_every = 1000000;
    p.reject_on_budget = false;

    auto final_x = [&](Integrator ig, double dt) {
        ModelParams q = p;
        q.integrator = ig;
        q.dt = dt;
        System sys(q);
        return sys.run().final_state;
    };
    auto err = [&](const GalerkinState& a, const GalerkinState& ref) {
        double e = 0;
        for (std::size_t i = 0; i < a.x.size(); ++i)
            e = std::max(e, std::abs(a.x[i] - ref.x[i]));
        for (std::size_t j = 0; j < a.y.size(); ++j)
            e = std::max(e, std::abs(a.y[j] - ref.y[j]));
        return e;
    };

    {
        GalerkinState ref = final_x(Integrator::semi_implicit, 0.2 / 512);
        double e1 = err(final_x(Integrator::semi_implicit, 0.02), ref);
        double e2 = err(final_x(Integrator::semi_implicit, 0.01), ref);
        double rate = e1 / e2;
        CHECK(rate > 1.6);
        CHECK(rate < 2.6);
    }
    {
        GalerkinState ref = final_x(Integrator::rk2_imex, 0.2 / 512);
        double e1 = err(final_x(Integrator::rk2_imex, 0.02), ref);
        double e2 = err(final_x(Integrator::rk2_imex, 0.01), ref);
        double rate = e1 / e2;
        CHECK(rate > 3.0);
        CHECK(rate < 5.5);
    }
}

TEST_CASE("runs are deterministic") {
    ModelParams p;
    p.prox = {0.2, 0.15, 0.1};
    p.M_s = 2;
    p.N = 8;
    p.dt = 5e-3;
    p.t_end = 0.1;
    p.sample_every = 5;
    p.w0_modes = {{1, 0.1}};
    System a(p), b2(p);
    RunRecord ra = a.run(), rb = b2.run();
    REQUIRE(ra.samples.size() == rb.samples.size());
    for (std::size_t m = 0; m < ra.samples.size(); ++m) {
        REQUIRE(ra.samples[m].x.size() == rb.samples[m].x.size());
        for (std::size_t i = 0; i < ra.samples[m].x.size(); ++i)
            CHECK(ra.samples[m].x[i] == rb.samples[m].x[i]);
        CHECK(ra.samples[m].residual == rb.samples[m].residual);
    }
}

TEST_CASE("sampling cadence and step count") {
    ModelParams p;
    p.prox = {0.5, 0.1, 0.1};
    p.M_s = 1;
    p.N = 8;
    p.dt = 0.01;
    p.t_end = 0.2; // 20 steps
    p.sample_every = 6;
    p.w0_modes = {{0, 0.05}};
    System sys(p);
    RunRecord rec = sys.run();
    CHECK(rec.steps == 20);
    REQUIRE(rec.samples.size() == 5); // steps 0, 6, 12, 18, 20
    CHECK(rec.samples.front().t == 0.0);
    CHECK(rec.samples.back().t == doctest::Approx(0.2));
    CHECK(rec.final_state.t == doctest::Approx(0.2));
}

TEST_CASE("prescribed forcing fields project onto the right coefficients") {
    ModelParams p;
    p.prox = {0.5, 0.1, 0.1};
    p.M_s = 2;
    p.N = 8;
    TensorBasis b = assemble_basis(p.M_s);
    // forcing = 0.7 * (an off-diagonal symmetric mode) - 0.4 * (a skew mode)
    auto wf = std::make_shared<TensorField>(b.sym_mode_field(3, p.N, Rep::nodal));
    for (double& v : wf->data) v *= 0.7;
    auto of = std::make_shared<TensorField>(b.skew_mode_field(4, p.N, Rep::nodal));
    for (double& v : of->data) v *= -0.4;
    p.wext_field = wf;
    p.oext_field = of;
    System sys(p);
    GalerkinState s = sys.initial_state();
    std::vector<double> dx, dy;
    sys.rhs(s, 0.0, dx, dy);
    for (int i = 0; i < b.n_sym(); ++i) {
        double want = (i == 3) ? 0.7 : 0.0;
        CHECK(dx[i] == doctest::Approx(want).epsilon(1e-11));
    }
    for (int j = 0; j < b.n_skew(); ++j) {
        double want = (j == 4) ? -0.4 * 2.0 / b.gamma_skew(4) : 0.0;
        CHECK(dy[j] == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("kinematic recovery fields are consistent") {
    ModelParams p;
    p.prox = {0.5, 0.1, 0.1};
    p.M_s = 2;
    p.N = 12;
    TensorBasis b = assemble_basis(p.M_s);
    GalerkinState s = random_state(b, 0.1);
    SynthFields f = synth_fields(s, b, p.N);

    LerayResult zr = recover_Z(f.W, f.Theta, LerayMode::projected);
    CHECK(zr.div_norm < 1e-8);
    TensorField phi = recover_Phi(f.W, f.Theta);
    CHECK(phi.rep == Rep::modal);
    CHECK(phi.rank == 1);
    // phi solves the Poisson problem with the negative divergence source
    TensorField Fdev(p.N, 2, Rep::nodal);
    const Mat3 I = Mat3::identity();
    for (std::size_t i = 0; i < f.W.n3(); ++i)
        Fdev.set_mat(i, f.R.mat_at(i) * f.W.mat_at(i) - I);
    TensorField src = div_rows(Fdev, Rep::modal);
    auto plan = Plan::get(p.N);
    double err = 0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < plan->n3(); ++i)
            err = std::max(err, std::abs(phi.comp(c)[i] * plan->gamma[i] +
                                         src.comp(c)[i]));
    CHECK(err < 1e-12);
}

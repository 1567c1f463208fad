#include "vsr/klimit.hpp"
#include <cmath>
#include <stdexcept>

namespace vsr {

namespace {

void require_k0(const ModelParams& p) {
    if (p.prox.k != 0.0)
        throw std::invalid_argument("zero-threshold system requires k = 0");
}

} // namespace

void rhs_k0(System& sys, const GalerkinState& s, double t,
            std::vector<double>& dx, std::vector<double>& dy, RhsAux* aux) {
    require_k0(sys.params());
    sys.rhs(s, t, dx, dy, aux, /*k0=*/true);
}

RunRecord run_k0(System& sys, const SampleCallback& on_sample) {
    require_k0(sys.params());
    return sys.run(on_sample, /*k0=*/true);
}

ContDepReport cont_dep_experiment(const ModelParams& params,
                                  const std::vector<std::pair<int, double>>& w0_1,
                                  const std::vector<std::pair<int, double>>& w0_2) {
    require_k0(params);
    ModelParams p1 = params, p2 = params;
    p1.w0_modes = w0_1;
    p2.w0_modes = w0_2;
    System s1(p1), s2(p2);
    RunRecord r1 = run_k0(s1), r2 = run_k0(s2);
    if (r1.samples.size() != r2.samples.size())
        throw std::runtime_error("trajectory sample counts differ");

    const TensorBasis& basis = s1.basis();
    ContDepReport rep;
    const auto& a0 = r1.samples.front();
    const auto& b0 = r2.samples.front();
    {
        double g = 0.0;
        for (std::size_t i = 0; i < a0.x.size(); ++i) {
            double d = a0.x[i] - b0.x[i];
            g += 0.5 * d * d;
        }
        for (std::size_t j = 0; j < a0.y.size(); ++j) {
            double d = a0.y[j] - b0.y[j];
            g += 0.25 * basis.gamma_skew(int(j)) * d * d;
        }
        rep.rhs0 = g;
    }

    double integral = 0.0, prev_rate = 0.0, prev_t = 0.0;
    for (std::size_t m = 0; m < r1.samples.size(); ++m) {
        const auto& sa = r1.samples[m];
        const auto& sb = r2.samples[m];
        double head = 0.0, rate = 0.0;
        for (std::size_t i = 0; i < sa.x.size(); ++i) {
            double d = sa.x[i] - sb.x[i];
            head += 0.5 * d * d;
            rate += basis.gamma_sym(int(i)) * d * d; // grad seminorm of the gap
        }
        for (std::size_t j = 0; j < sa.y.size(); ++j) {
            double d = sa.y[j] - sb.y[j];
            double g = basis.gamma_skew(int(j));
            head += 0.25 * g * d * d;
            rate += 0.5 * g * d * d;
        }
        // dislocation and deformation gaps need the recovered fields
        GalerkinState ga{sa.x, sa.y, sa.t}, gb{sb.x, sb.y, sb.t};
        SynthFields fa = synth_fields(ga, basis, params.N);
        SynthFields fb = synth_fields(gb, basis, params.N);
        TensorField Za = recover_Z(fa.W, fa.Theta).Z;
        TensorField Zb = recover_Z(fb.W, fb.Theta).Z;
        TensorField Pa = recover_Phi(fa.W, fa.Theta);
        TensorField Pb = recover_Phi(fb.W, fb.Theta);
        auto plan = Plan::get(params.N);
        auto h1gap = [&](const TensorField& A, const TensorField& B) {
            double s = 0.0;
            for (int c = 0; c < A.comps(); ++c) {
                const double* ca = A.comp(c);
                const double* cb = B.comp(c);
                for (std::size_t i = 0; i < A.n3(); ++i) {
                    double d = ca[i] - cb[i];
                    s += plan->gamma[i] * d * d;
                }
            }
            return s;
        };
        rate += h1gap(Za, Zb) + h1gap(Pa, Pb);

        if (m > 0) integral += 0.5 * (sa.t - prev_t) * (prev_rate + rate);
        prev_rate = rate;
        prev_t = sa.t;
        rep.t.push_back(sa.t);
        rep.lhs.push_back(head + integral);
    }
    if (rep.rhs0 < 1e-14) {
        rep.C_emp = 0.0;
    } else {
        for (double v : rep.lhs) rep.C_emp = std::max(rep.C_emp, v / rep.rhs0);
    }
    return rep;
}

} // namespace vsr

#include "vsr/galerkin.hpp"
#include "vsr/kernels.hpp"
#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace vsr {

namespace {

const double SQ2 = std::sqrt(2.0);

// skew axial vector from the (01),(02),(12) entries
SkewMat3 axial_from_upper(double t01, double t02, double t12) {
    return SkewMat3{{-t12, t02, -t01}};
}

} // namespace

void ModelParams::validate() const {
    prox.validate();
    if (M_s < 1) throw std::invalid_argument("M_s must be >= 1");
    if (N < 4) throw std::invalid_argument("N must be >= 4");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
    if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
    TensorBasis b = assemble_basis(M_s);
    int wmax = b.max_wavenumber();
    if (wmax > N) throw std::invalid_argument("mode cutoff exceeds grid resolution");
    if (dealias && 3 * wmax > 2 * N)
        throw std::invalid_argument("dealiasing would truncate retained modes");
    for (auto& [i, c] : w0_modes) {
        if (i < 0 || i >= b.n_sym())
            throw std::invalid_argument("initial-mode index out of range");
        (void)c;
    }
    if (wext_field && (wext_field->N != N || wext_field->rank != 2))
        throw std::invalid_argument("prescribed stretch forcing has wrong shape");
    if (oext_field && (oext_field->N != N || oext_field->rank != 2))
        throw std::invalid_argument("prescribed rotation forcing has wrong shape");
}

SynthFields synth_fields(const GalerkinState& s, const TensorBasis& basis, int N) {
    SynthFields out;
    out.W = TensorField(N, 2, Rep::modal);
    out.Theta = TensorField(N, 2, Rep::modal);
    for (int i = 0; i < basis.n_sym(); ++i) {
        const ScalarMode& sm = basis.modes[i / 6];
        std::size_t idx = sm.modal_index(N);
        int a = TensorBasis::sym_dir[i % 6][0], b = TensorBasis::sym_dir[i % 6][1];
        if (a == b) {
            out.W.comp(4 * a)[idx] += s.x[i];
        } else {
            out.W.comp(3 * a + b)[idx] += s.x[i] / SQ2;
            out.W.comp(3 * b + a)[idx] += s.x[i] / SQ2;
        }
    }
    for (int j = 0; j < basis.n_skew(); ++j) {
        const ScalarMode& sm = basis.modes[j / 3];
        std::size_t idx = sm.modal_index(N);
        int a = TensorBasis::skew_dir[j % 3][0], b = TensorBasis::skew_dir[j % 3][1];
        out.Theta.comp(3 * a + b)[idx] += s.y[j] / SQ2;
        out.Theta.comp(3 * b + a)[idx] -= s.y[j] / SQ2;
    }
    out.W = out.W.to_nodal();
    out.Theta = out.Theta.to_nodal();
    const std::size_t n = out.W.n3();
    for (int d = 0; d < 3; ++d) {
        double* c = out.W.comp(4 * d);
        for (std::size_t i = 0; i < n; ++i) c[i] += 1.0;
    }
    out.R = TensorField(N, 2, Rep::nodal);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 T = out.Theta.mat_at(i);
        out.R.set_mat(i, exp_skew(axial_from_upper(T(0, 1), T(0, 2), T(1, 2))));
    }
    return out;
}

namespace {

// exp(Theta) W - I as a nodal rank-2 field
TensorField deformation_dev(const TensorField& W, const TensorField& Theta) {
    TensorField Wn = W.to_nodal(), Tn = Theta.to_nodal();
    TensorField F(Wn.N, 2, Rep::nodal);
    const std::size_t n = Wn.n3();
    const Mat3 I = Mat3::identity();
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 T = Tn.mat_at(i);
        Mat3 R = exp_skew(axial_from_upper(T(0, 1), T(0, 2), T(1, 2)));
        F.set_mat(i, R * Wn.mat_at(i) - I);
    }
    return F;
}

} // namespace

LerayResult recover_Z(const TensorField& W, const TensorField& Theta, LerayMode mode) {
    return leray_inv_laplacian(curl_rows(deformation_dev(W, Theta), Rep::modal), mode);
}

TensorField recover_Phi(const TensorField& W, const TensorField& Theta) {
    TensorField d = div_rows(deformation_dev(W, Theta), Rep::modal);
    for (double& v : d.data) v = -v;
    return inv_laplacian_dirichlet(d, Rep::modal);
}

System::System(const ModelParams& p) : params_(p), basis_(assemble_basis(p.M_s)) {
    params_.validate();
    plan_ = Plan::get(params_.N);
    pw_.assign(basis_.n_sym(), 0.0);
    po_.assign(basis_.n_skew(), 0.0);
    auto project = [&](const TensorField& f, bool sym) {
        TensorField fm = f.to_modal();
        if (sym)
            for (int i = 0; i < basis_.n_sym(); ++i) {
                std::size_t idx = basis_.modes[i / 6].modal_index(params_.N);
                int a = TensorBasis::sym_dir[i % 6][0], b = TensorBasis::sym_dir[i % 6][1];
                pw_[i] = (a == b) ? fm.comp(4 * a)[idx]
                                  : SQ2 * 0.5 * (fm.comp(3 * a + b)[idx] + fm.comp(3 * b + a)[idx]);
            }
        else
            for (int j = 0; j < basis_.n_skew(); ++j) {
                std::size_t idx = basis_.modes[j / 3].modal_index(params_.N);
                int a = TensorBasis::skew_dir[j % 3][0], b = TensorBasis::skew_dir[j % 3][1];
                po_[j] = SQ2 * 0.5 * (fm.comp(3 * a + b)[idx] - fm.comp(3 * b + a)[idx]);
            }
    };
    if (params_.wext_field) project(*params_.wext_field, true);
    if (params_.oext_field) project(*params_.oext_field, false);
}

GalerkinState System::initial_state() const {
    GalerkinState s;
    s.x.assign(basis_.n_sym(), 0.0);
    s.y.assign(basis_.n_skew(), 0.0);
    for (auto& [i, c] : params_.w0_modes) s.x[i] += c;
    if (!params_.w0_modes.empty()) {
        SynthFields f = synth_fields(s, basis_, params_.N);
        const std::size_t n = f.W.n3();
        for (std::size_t i = 0; i < n; ++i) {
            SymMat3 Ws = sym_skew_split(f.W.mat_at(i)).first;
            if (eig_sym(Ws).evals[0] < params_.prox.alpha)
                throw std::invalid_argument(
                    "initial stretch leaves the admissible set (eigenvalue below alpha)");
        }
    }
    return s;
}

void System::rhs(const GalerkinState& s, double t, std::vector<double>& dx,
                 std::vector<double>& dy, RhsAux* aux, bool k0) {
    stage(s.x, s.y, t, dx, dy, aux, k0);
}

void System::stage(const std::vector<double>& xin, const std::vector<double>& yin,
                   double t, std::vector<double>& dx, std::vector<double>& dy,
                   RhsAux* aux, bool k0) {
    const int N = params_.N;
    const std::size_t n = std::size_t(N) * N * N;
    const Plan& P = *plan_;
    const double h = P.h, w = h * h * h;
    const ProxParams& prox = params_.prox;
    using Arr = std::vector<double>;

    auto dealias = [&](double* a) {
        if (!params_.dealias) return;
        const int cut = 2 * N / 3; // keep 1-based wavenumbers <= cut
        for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l)
                for (int m = 0; m < N; ++m)
                    if (k + 1 > cut || l + 1 > cut || m + 1 > cut)
                        a[(std::size_t(k) * N + l) * N + m] = 0.0;
    };

    // ---- synthesis: W (6 comps) and Theta (3 comps), modal then nodal
    std::array<Arr, 6> Wn;
    std::array<Arr, 3> Tn;
    {
        Arr modal(n);
        for (int d = 0; d < 6; ++d) {
            std::memset(modal.data(), 0, n * sizeof(double));
            for (int i = d; i < basis_.n_sym(); i += 6) {
                std::size_t idx = basis_.modes[i / 6].modal_index(N);
                modal[idx] = (d < 3) ? xin[i] : xin[i] / SQ2;
            }
            Wn[d].resize(n);
            P.inverse(Wn[d].data(), modal.data());
        }
        for (int e = 0; e < 3; ++e) {
            std::memset(modal.data(), 0, n * sizeof(double));
            for (int j = e; j < basis_.n_skew(); j += 3) {
                std::size_t idx = basis_.modes[j / 3].modal_index(N);
                modal[idx] = yin[j] / SQ2;
            }
            Tn[e].resize(n);
            P.inverse(Tn[e].data(), modal.data());
        }
    }

    // ---- rotation and deformation deviation F = exp(Theta) W - I, nodal
    std::array<Arr, 9> Rn, Fm; // rotation nodal; F, later reused as modal
    for (auto& a : Rn) a.resize(n);
    for (auto& a : Fm) a.resize(n);
    const Mat3 I3 = Mat3::identity();
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 W;
        W(0, 0) = Wn[0][i] + 1.0; W(1, 1) = Wn[1][i] + 1.0; W(2, 2) = Wn[2][i] + 1.0;
        W(0, 1) = W(1, 0) = Wn[3][i];
        W(0, 2) = W(2, 0) = Wn[4][i];
        W(1, 2) = W(2, 1) = Wn[5][i];
        Mat3 R = exp_skew(axial_from_upper(Tn[0][i], Tn[1][i], Tn[2][i]));
        Mat3 F = R * W - I3;
        for (int c = 0; c < 9; ++c) {
            Rn[c][i] = R.m[c];
            Fm[c][i] = F.m[c];
        }
    }
    {
        Arr tmp(n);
        for (int c = 0; c < 9; ++c) {
            P.forward(tmp.data(), Fm[c].data());
            dealias(tmp.data());
            Fm[c].swap(tmp);
        }
    }

    // ---- modal row-wise curl helper
    auto curl_modal = [&](std::array<Arr, 9>& out, const std::array<Arr, 9>& in) {
        static const int tab[3][2][2] = {
            {{1, 2}, {2, 1}}, {{2, 0}, {0, 2}}, {{0, 1}, {1, 0}}};
        Arr tmp(n);
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 3; ++j) {
                out[r * 3 + j].resize(n);
                P.modal_deriv(out[r * 3 + j].data(), in[r * 3 + tab[j][0][1]].data(),
                              tab[j][0][0]);
                P.modal_deriv(tmp.data(), in[r * 3 + tab[j][1][1]].data(), tab[j][1][0]);
                kern::ops().axpy(out[r * 3 + j].data(), tmp.data(), n, -1.0);
            }
    };

    // ---- Z = G_div * curl F (modal)
    std::array<Arr, 9> Zm;
    curl_modal(Zm, Fm);
    for (int c = 0; c < 9; ++c)
        for (std::size_t i = 0; i < n; ++i) Zm[c][i] /= P.gamma[i];
    double div_norm = 0.0;
    if (params_.leray == LerayMode::projected) {
        TensorField tf(N, 2, Rep::modal);
        curl_modal(Zm, Fm); // rebuild the right-hand side
        for (int c = 0; c < 9; ++c)
            std::memcpy(tf.comp(c), Zm[c].data(), n * sizeof(double));
        LerayResult lr = leray_inv_laplacian(tf, LerayMode::projected);
        for (int c = 0; c < 9; ++c)
            std::memcpy(Zm[c].data(), lr.Z.comp(c), n * sizeof(double));
        div_norm = lr.div_norm;
    } else {
        Arr d(n), tmp(n);
        double s2 = 0.0;
        for (int r = 0; r < 3; ++r) {
            P.modal_deriv(d.data(), Zm[r * 3].data(), 0);
            for (int b = 1; b < 3; ++b) {
                P.modal_deriv(tmp.data(), Zm[r * 3 + b].data(), b);
                kern::ops().axpy(d.data(), tmp.data(), n, 1.0);
            }
            s2 += kern::ops().dot(d.data(), d.data(), n);
        }
        div_norm = std::sqrt(s2);
    }

    // ---- curl Z at nodes, then the dislocation stress Sigma
    std::array<Arr, 9> CZ;
    curl_modal(CZ, Zm);
    for (int c = 0; c < 9; ++c) {
        Arr tmp(n);
        P.inverse(tmp.data(), CZ[c].data());
        CZ[c].swap(tmp);
    }
    double psiD_env = 0, psiD_l1 = 0, psiD_l2 = 0, curlz2 = 0, sig_linf = 0;
    std::size_t dead = 0;
    std::array<Arr, 9> Sg;
    for (auto& a : Sg) a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 B;
        for (int c = 0; c < 9; ++c) B.m[c] = CZ[c][i];
        double nb = frob_norm(B);
        curlz2 += nb * nb;
        Mat3 S;
        if (k0) {
            S = B;
            psiD_env += 0.5 * nb * nb;
        } else {
            Mat3 A = psiD_resolvent(B, prox);
            if (frob_norm(A) == 0.0) ++dead;
            S = (B - A) * (1.0 / prox.lambda);
            Mat3 d = B - A;
            psiD_env += psiD_value(A, prox.k) + frob_inner(d, d) / (2.0 * prox.lambda);
            psiD_l1 += prox.k * nb;
            psiD_l2 += 0.5 * nb * nb;
        }
        sig_linf = std::max(sig_linf, frob_norm(S));
        for (int c = 0; c < 9; ++c) Sg[c][i] = S.m[c];
    }
    {
        Arr tmp(n);
        for (int c = 0; c < 9; ++c) {
            P.forward(tmp.data(), Sg[c].data());
            dealias(tmp.data());
            Sg[c].swap(tmp);
        }
    }

    // ---- K = adjoint of the curl(G_div * curl .) chain, applied to Sigma.
    // Using the transpose derivative matrices makes the stress force the
    // exact coefficient-gradient of the quadrature dissipation energy (the
    // budget residual is then purely temporal); against smooth modes the
    // adjoint agrees with the forward composition to truncation order.
    auto curl_modal_t = [&](std::array<Arr, 9>& out, const std::array<Arr, 9>& in) {
        static const int tab[3][2][2] = {
            {{1, 2}, {2, 1}}, {{2, 0}, {0, 2}}, {{0, 1}, {1, 0}}};
        Arr tmp(n);
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 3; ++j) {
                // forward: out_j = D_{a1} in_{b1} - D_{a2} in_{b2};
                // adjoint scatters D^T out_j into columns b1, b2
                out[r * 3 + j].assign(n, 0.0);
            }
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 3; ++j) {
                P.modal_deriv_t(tmp.data(), in[r * 3 + j].data(), tab[j][0][0]);
                kern::ops().axpy(out[r * 3 + tab[j][0][1]].data(), tmp.data(), n, 1.0);
                P.modal_deriv_t(tmp.data(), in[r * 3 + j].data(), tab[j][1][0]);
                kern::ops().axpy(out[r * 3 + tab[j][1][1]].data(), tmp.data(), n, -1.0);
            }
    };
    std::array<Arr, 9> Vm, Km;
    curl_modal_t(Vm, Sg);
    for (int c = 0; c < 9; ++c)
        for (std::size_t i = 0; i < n; ++i) Vm[c][i] /= P.gamma[i];
    curl_modal_t(Km, Vm);
    for (int c = 0; c < 9; ++c) {
        Arr tmp(n);
        P.inverse(tmp.data(), Km[c].data());
        Km[c].swap(tmp);
    }

    // ---- assemble the projected right-hand side fields
    const double cw = params_.wext.factor(t);
    const double co = params_.oext.factor(t);
    const TensorField* pwf = params_.wext_field.get();
    const TensorField* pof = params_.oext_field.get();
    std::array<Arr, 6> Ps;
    std::array<Arr, 3> Pa;
    for (auto& a : Ps) a.resize(n);
    for (auto& a : Pa) a.resize(n);
    double psihat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 W, R, Rt, K;
        W(0, 0) = Wn[0][i] + 1.0; W(1, 1) = Wn[1][i] + 1.0; W(2, 2) = Wn[2][i] + 1.0;
        W(0, 1) = W(1, 0) = Wn[3][i];
        W(0, 2) = W(2, 0) = Wn[4][i];
        W(1, 2) = W(2, 1) = Wn[5][i];
        for (int c = 0; c < 9; ++c) {
            R.m[c] = Rn[c][i];
            K.m[c] = Km[c][i];
        }
        Rt = R.transpose();
        SymMat3 Ws{{W(0, 0), W(1, 1), W(2, 2), W(0, 1), W(0, 2), W(1, 2)}};
        SymMat3 proj = spd_project(Ws, prox.alpha);
        SymMat3 chi = (Ws - proj) * (1.0 / prox.lambda);
        {
            Mat3 d = (Ws - proj).full();
            psihat += frob_inner(d, d) / (2.0 * prox.lambda);
        }
        Mat3 sK = sym_part(Rt * K);
        Mat3 aK = skew_part(K * W * Rt);
        Ps[0][i] = -chi.a[0] + cw * Wn[0][i] - sK(0, 0);
        Ps[1][i] = -chi.a[1] + cw * Wn[1][i] - sK(1, 1);
        Ps[2][i] = -chi.a[2] + cw * Wn[2][i] - sK(2, 2);
        Ps[3][i] = -chi.a[3] + cw * Wn[3][i] - sK(0, 1);
        Ps[4][i] = -chi.a[4] + cw * Wn[4][i] - sK(0, 2);
        Ps[5][i] = -chi.a[5] + cw * Wn[5][i] - sK(1, 2);
        Pa[0][i] = co * Tn[0][i] - aK(0, 1);
        Pa[1][i] = co * Tn[1][i] - aK(0, 2);
        Pa[2][i] = co * Tn[2][i] - aK(1, 2);
        if (pwf) {
            Ps[0][i] += pwf->comp(0)[i];
            Ps[1][i] += pwf->comp(4)[i];
            Ps[2][i] += pwf->comp(8)[i];
            Ps[3][i] += 0.5 * (pwf->comp(1)[i] + pwf->comp(3)[i]);
            Ps[4][i] += 0.5 * (pwf->comp(2)[i] + pwf->comp(6)[i]);
            Ps[5][i] += 0.5 * (pwf->comp(5)[i] + pwf->comp(7)[i]);
        }
        if (pof) {
            Pa[0][i] += 0.5 * (pof->comp(1)[i] - pof->comp(3)[i]);
            Pa[1][i] += 0.5 * (pof->comp(2)[i] - pof->comp(6)[i]);
            Pa[2][i] += 0.5 * (pof->comp(5)[i] - pof->comp(7)[i]);
        }
    }

    // ---- project onto the tensor basis
    dx.assign(basis_.n_sym(), 0.0);
    dy.assign(basis_.n_skew(), 0.0);
    {
        Arr modal(n);
        for (int d = 0; d < 6; ++d) {
            P.forward(modal.data(), Ps[d].data());
            for (int i = d; i < basis_.n_sym(); i += 6) {
                std::size_t idx = basis_.modes[i / 6].modal_index(N);
                double proj = (d < 3) ? modal[idx] : SQ2 * modal[idx];
                dx[i] = -(1.0 + basis_.gamma_sym(i)) * xin[i] + proj;
            }
        }
        for (int e = 0; e < 3; ++e) {
            P.forward(modal.data(), Pa[e].data());
            for (int j = e; j < basis_.n_skew(); j += 3) {
                std::size_t idx = basis_.modes[j / 3].modal_index(N);
                double proj = SQ2 * modal[idx];
                dy[j] = -yin[j] + (2.0 / basis_.gamma_skew(j)) * proj;
            }
        }
    }
    for (double v : dx)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite stretch rhs");
    for (double v : dy)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite rotation rhs");

    if (aux) {
        aux->psihat_env = w * psihat;
        aux->psiD_env = w * psiD_env;
        aux->psiD_l1 = w * psiD_l1;
        aux->psiD_l2 = w * psiD_l2;
        aux->curlz_l2 = std::sqrt(w * curlz2);
        aux->sigma_linf = sig_linf;
        aux->deadzone_frac = k0 ? 0.0 : double(dead) / double(n);
        aux->div_norm = div_norm;
    }
}

void System::integrating_factor(GalerkinState& s, const std::vector<double>& dx,
                                const std::vector<double>& dy, double dt) const {
    for (int i = 0; i < basis_.n_sym(); ++i) {
        double a = 1.0 + basis_.gamma_sym(i);
        double E = std::exp(-a * dt);
        double Nl = dx[i] + a * s.x[i];
        s.x[i] = E * s.x[i] + (1.0 - E) / a * Nl;
    }
    for (int j = 0; j < basis_.n_skew(); ++j) {
        double E = std::exp(-dt);
        double Nl = dy[j] + s.y[j];
        s.y[j] = E * s.y[j] + (1.0 - E) * Nl;
    }
}

GalerkinState System::step(const GalerkinState& s, double dt, bool k0) {
    std::vector<double> dx, dy;
    stage(s.x, s.y, s.t, dx, dy, nullptr, k0);
    GalerkinState s1 = s;
    integrating_factor(s1, dx, dy, dt);
    s1.t = s.t + dt;
    if (params_.integrator == Integrator::rk2_imex) {
        std::vector<double> dx2, dy2;
        stage(s1.x, s1.y, s1.t, dx2, dy2, nullptr, k0);
        for (int i = 0; i < basis_.n_sym(); ++i) {
            double a = 1.0 + basis_.gamma_sym(i);
            double phi2 = (std::exp(-a * dt) - 1.0 + a * dt) / (a * a * dt);
            double dN = (dx2[i] + a * s1.x[i]) - (dx[i] + a * s.x[i]);
            s1.x[i] += phi2 * dN;
        }
        for (int j = 0; j < basis_.n_skew(); ++j) {
            double phi2 = (std::exp(-dt) - 1.0 + dt) / dt;
            double dN = (dy2[j] + s1.y[j]) - (dy[j] + s.y[j]);
            s1.y[j] += phi2 * dN;
        }
    }
    return s1;
}

RunRecord System::run(const SampleCallback& on_sample, bool k0) {
    RunRecord rec;
    GalerkinState s = initial_state();
    const double dt = params_.dt;
    const int nsteps = std::max(1, int(std::llround(params_.t_end / dt)));

    std::vector<double> dx, dy, dx2, dy2;
    RhsAux aux;
    double E0 = 0.0, dissip_cum = 0.0, work_cum = 0.0;
    double D_prev = 0.0, P_prev = 0.0;
    double scale = 1.0;

    auto energy = [&](const GalerkinState& st, const RhsAux& ax) {
        double E = 0.0;
        for (int i = 0; i < basis_.n_sym(); ++i)
            E += 0.5 * (1.0 + basis_.gamma_sym(i)) * st.x[i] * st.x[i];
        for (int j = 0; j < basis_.n_skew(); ++j)
            E += 0.25 * basis_.gamma_skew(j) * st.y[j] * st.y[j];
        return E + ax.psihat_env + ax.psiD_env;
    };
    auto power = [&](const GalerkinState& st, const std::vector<double>& vx,
                     const std::vector<double>& vy, double t) {
        double cw = params_.wext.factor(t), co = params_.oext.factor(t);
        double Pt = 0.0;
        for (int i = 0; i < basis_.n_sym(); ++i)
            Pt += (cw * st.x[i] + pw_[i]) * vx[i];
        for (int j = 0; j < basis_.n_skew(); ++j)
            Pt += (co * st.y[j] + po_[j]) * vy[j];
        return Pt;
    };
    auto dissip = [&](const std::vector<double>& vx, const std::vector<double>& vy) {
        double D = 0.0;
        for (int i = 0; i < basis_.n_sym(); ++i) D += vx[i] * vx[i];
        for (int j = 0; j < basis_.n_skew(); ++j)
            D += 0.5 * basis_.gamma_skew(j) * vy[j] * vy[j];
        return D;
    };
    auto record = [&](const GalerkinState& st, const RhsAux& ax) {
        Sample smp;
        smp.t = st.t;
        double w2 = 0, th_l2 = 0;
        for (double v : st.x) w2 += v * v;
        for (double v : st.y) th_l2 += v * v;
        smp.wdev_l2 = std::sqrt(w2);
        smp.theta_l2 = std::sqrt(th_l2);
        smp.energy = energy(st, ax);
        smp.energy_apriori = smp.energy + 0.25 * th_l2;
        smp.dissip_cum = dissip_cum;
        smp.work_cum = work_cum;
        smp.residual = smp.energy - E0 + dissip_cum - work_cum;
        smp.aux = ax;
        smp.x = st.x;
        smp.y = st.y;
        rec.samples.push_back(smp);
        if (on_sample) on_sample(smp, st);
        return smp.residual;
    };

    for (int step_i = 0; step_i <= nsteps; ++step_i) {
        stage(s.x, s.y, s.t, dx, dy, &aux, k0);
        double D = dissip(dx, dy), Pt = power(s, dx, dy, s.t);
        if (step_i == 0)
            E0 = energy(s, aux);
        else {
            dissip_cum += 0.5 * dt * (D_prev + D);
            work_cum += 0.5 * dt * (P_prev + Pt);
        }
        D_prev = D;
        P_prev = Pt;
        scale = std::max(scale, D + std::abs(Pt));

        if (step_i % params_.sample_every == 0 || step_i == nsteps) {
            double res = record(s, aux);
            double tol = 10.0 * std::max(1, step_i) * dt * dt * scale;
            if (params_.reject_on_budget && std::abs(res) > std::max(tol, 1e-12))
                throw std::runtime_error("energy budget violated at t=" +
                                         std::to_string(s.t));
        }
        if (step_i == nsteps) break;

        // advance (re-uses the already computed slope)
        GalerkinState s1 = s;
        integrating_factor(s1, dx, dy, dt);
        s1.t = s.t + dt;
        if (params_.integrator == Integrator::rk2_imex) {
            stage(s1.x, s1.y, s1.t, dx2, dy2, nullptr, k0);
            for (int i = 0; i < basis_.n_sym(); ++i) {
                double a = 1.0 + basis_.gamma_sym(i);
                double phi2 = (std::exp(-a * dt) - 1.0 + a * dt) / (a * a * dt);
                s1.x[i] += phi2 * ((dx2[i] + a * s1.x[i]) - (dx[i] + a * s.x[i]));
            }
            for (int j = 0; j < basis_.n_skew(); ++j) {
                double phi2 = (std::exp(-dt) - 1.0 + dt) / dt;
                s1.y[j] += phi2 * ((dy2[j] + s1.y[j]) - (dy[j] + s.y[j]));
            }
        }
        s = s1;
        ++rec.steps;
    }
    rec.final_state = s;
    return rec;
}

} // namespace vsr

#include "vsr/convex.hpp"
#include "vsr/spectral.hpp"
#include <cmath>
#include <stdexcept>

namespace vsr {

void ProxParams::validate() const {
    if (!(k >= 0.0)) throw std::invalid_argument("k must be >= 0");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("lambda must be in (0,1)");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
}

Mat3 psiD_resolvent(const Mat3& B, const ProxParams& p) {
    double nb = frob_norm(B);
    if (nb <= p.lambda * p.k) return Mat3{};
    return B * ((nb - p.lambda * p.k) / ((1.0 + p.lambda) * nb));
}

Mat3 psiD_yosida(const Mat3& B, const ProxParams& p) {
    Mat3 A = psiD_resolvent(B, p);
    return (B - A) * (1.0 / p.lambda);
}

double psiD_value(const Mat3& A, double k) {
    double na = frob_norm(A);
    return k * na + 0.5 * na * na;
}

double psiD_envelope(const Mat3& B, const ProxParams& p) {
    Mat3 A = psiD_resolvent(B, p);
    Mat3 d = B - A;
    return psiD_value(A, p.k) + frob_inner(d, d) / (2.0 * p.lambda);
}

SymMat3 spd_project(const SymMat3& W, double alpha) {
    EigSym3 e = eig_sym(W);
    if (e.evals[0] >= alpha) return W;
    Mat3 D{};
    for (int i = 0; i < 3; ++i) D(i, i) = std::max(e.evals[i], alpha);
    Mat3 rec = e.frame * D * e.frame.transpose();
    SymMat3 out;
    out.a[0] = rec(0, 0); out.a[1] = rec(1, 1); out.a[2] = rec(2, 2);
    out.a[3] = 0.5 * (rec(0, 1) + rec(1, 0));
    out.a[4] = 0.5 * (rec(0, 2) + rec(2, 0));
    out.a[5] = 0.5 * (rec(1, 2) + rec(2, 1));
    return out;
}

SymMat3 chi_yosida(const SymMat3& W, const ProxParams& p) {
    return (W - spd_project(W, p.alpha)) * (1.0 / p.lambda);
}

double spd_envelope(const SymMat3& W, const ProxParams& p) {
    SymMat3 d = W - spd_project(W, p.alpha);
    Mat3 f = d.full();
    return frob_inner(f, f) / (2.0 * p.lambda);
}

EnergyBreakdown energy_total(const TensorField& W, const TensorField& Theta,
                             const TensorField& Z, const ProxParams& p) {
    p.validate();
    const int N = W.N;
    const std::size_t n = std::size_t(N) * N * N;
    const double h = M_PI / (N + 1);
    const double w = h * h * h;
    EnergyBreakdown E;

    TensorField Wn = W.to_nodal(), Tn = Theta.to_nodal();
    TensorField Wdev = Wn, Rdev(N, 2, Rep::nodal); // W - I and exp(Theta) - I
    for (int d = 0; d < 3; ++d) {
        double* c = Wdev.comp(4 * d);
        for (std::size_t i = 0; i < n; ++i) c[i] -= 1.0;
    }
    const Mat3 I = Mat3::identity();
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 Wl = Wn.mat_at(i);
        Mat3 T = Tn.mat_at(i);
        SkewMat3 th{{T(2, 1), T(0, 2), T(1, 0)}};
        Rdev.set_mat(i, exp_skew(th) - I);
        SymMat3 Ws = sym_skew_split(Wl).first;
        E.elastic += 0.5 * w * frob_inner(Wl - I, Wl - I);
        E.indicator += w * spd_envelope(Ws, p);
    }
    // gradient energies via the modal H1 seminorm (exact for the interpolant,
    // and the same weights the integrator's budget uses)
    Norms gw = field_norms(Wdev.to_modal());
    Norms gr = field_norms(Rdev.to_modal());
    E.grad_W = 0.5 * gw.H1_semi * gw.H1_semi;
    E.grad_R = 0.5 * gr.H1_semi * gr.H1_semi;

    TensorField curlZ = curl_rows(Z, Rep::nodal);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 C = curlZ.mat_at(i);
        double nc = frob_norm(C);
        E.disloc_l1 += w * p.k * nc;
        E.disloc_l2 += 0.5 * w * nc * nc;
        E.disloc_env += w * psiD_envelope(C, p);
    }
    return E;
}

double dissipation_rate(const TensorField& Wdot, const TensorField& Omega) {
    Norms nw = field_norms(Wdot);
    Norms go = field_norms(Omega.to_modal());
    return 0.5 * nw.L2 * nw.L2 + 0.5 * go.H1_semi * go.H1_semi;
}

} // namespace vsr

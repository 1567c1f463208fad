#include "vsr/spectral.hpp"
#include "vsr/kernels.hpp"
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace vsr {

namespace {

TensorField finish(TensorField modal, Rep out_rep) {
    return out_rep == Rep::modal ? std::move(modal) : modal.to_nodal();
}

} // namespace

TensorField grad_field(const TensorField& F, Rep out_rep) {
    TensorField Fm = F.to_modal();
    auto plan = Plan::get(F.N);
    TensorField out(F.N, F.rank + 1, Rep::modal);
    for (int c = 0; c < Fm.comps(); ++c)
        for (int a = 0; a < 3; ++a)
            plan->modal_deriv(out.comp(c * 3 + a), Fm.comp(c), a);
    return finish(std::move(out), out_rep);
}

TensorField div_rows(const TensorField& F, Rep out_rep) {
    if (F.rank < 1) throw std::invalid_argument("div needs rank >= 1");
    TensorField Fm = F.to_modal();
    auto plan = Plan::get(F.N);
    TensorField out(F.N, F.rank - 1, Rep::modal);
    std::vector<double> tmp(Fm.n3());
    const auto& K = kern::ops();
    for (int c = 0; c < out.comps(); ++c)
        for (int a = 0; a < 3; ++a) {
            plan->modal_deriv(tmp.data(), Fm.comp(c * 3 + a), a);
            K.axpy(out.comp(c), tmp.data(), tmp.size(), 1.0);
        }
    return finish(std::move(out), out_rep);
}

TensorField curl_rows(const TensorField& F, Rep out_rep) {
    if (F.rank < 1) throw std::invalid_argument("curl needs rank >= 1");
    TensorField Fm = F.to_modal();
    auto plan = Plan::get(F.N);
    TensorField out(F.N, F.rank, Rep::modal);
    std::vector<double> tmp(Fm.n3());
    const auto& K = kern::ops();
    const int nrows = out.comps() / 3;
    // (curl v)_j = eps_{jab} d_a v_b applied to each row vector
    static const int tab[3][2][2] = {
        {{1, 2}, {2, 1}}, // j=0: d1 v2 - d2 v1
        {{2, 0}, {0, 2}}, // j=1: d2 v0 - d0 v2
        {{0, 1}, {1, 0}}, // j=2: d0 v1 - d1 v0
    };
    for (int r = 0; r < nrows; ++r)
        for (int j = 0; j < 3; ++j) {
            double* dst = out.comp(r * 3 + j);
            plan->modal_deriv(dst, Fm.comp(r * 3 + tab[j][0][1]), tab[j][0][0]);
            plan->modal_deriv(tmp.data(), Fm.comp(r * 3 + tab[j][1][1]), tab[j][1][0]);
            K.axpy(dst, tmp.data(), tmp.size(), -1.0);
        }
    return finish(std::move(out), out_rep);
}

TensorField curl_rows_adjoint(const TensorField& F, Rep out_rep) {
    if (F.rank < 1) throw std::invalid_argument("curl adjoint needs rank >= 1");
    TensorField Fm = F.to_modal();
    auto plan = Plan::get(F.N);
    TensorField out(F.N, F.rank, Rep::modal);
    std::vector<double> tmp(Fm.n3());
    const auto& K = kern::ops();
    const int nrows = out.comps() / 3;
    // exact transpose of curl_rows in the modal dot product: the forward map
    // sends column b to column j through d_a; here D^T of column j scatters
    // back into column b with the same sign
    static const int tab[3][2][2] = {
        {{1, 2}, {2, 1}}, {{2, 0}, {0, 2}}, {{0, 1}, {1, 0}}};
    for (int c = 0; c < out.comps(); ++c)
        std::fill(out.comp(c), out.comp(c) + out.n3(), 0.0);
    for (int r = 0; r < nrows; ++r)
        for (int j = 0; j < 3; ++j) {
            plan->modal_deriv_t(tmp.data(), Fm.comp(r * 3 + j), tab[j][0][0]);
            K.axpy(out.comp(r * 3 + tab[j][0][1]), tmp.data(), tmp.size(), 1.0);
            plan->modal_deriv_t(tmp.data(), Fm.comp(r * 3 + j), tab[j][1][0]);
            K.axpy(out.comp(r * 3 + tab[j][1][1]), tmp.data(), tmp.size(), -1.0);
        }
    return finish(std::move(out), out_rep);
}

TensorField inv_laplacian_dirichlet(const TensorField& F, Rep out_rep) {
    TensorField out = F.to_modal();
    auto plan = Plan::get(F.N);
    for (int c = 0; c < out.comps(); ++c) {
        double* a = out.comp(c);
        for (std::size_t i = 0; i < out.n3(); ++i) a[i] /= plan->gamma[i];
    }
    return finish(std::move(out), out_rep);
}

namespace {

// modal row divergence: d = sum_b G_b z_b
void row_div(const Plan& plan, double* d, const double* const z[3],
             std::vector<double>& tmp) {
    const auto& K = kern::ops();
    plan.modal_deriv(d, z[0], 0);
    for (int b = 1; b < 3; ++b) {
        plan.modal_deriv(tmp.data(), z[b], b);
        K.axpy(d, tmp.data(), tmp.size(), 1.0);
    }
}

double l2(const std::vector<double>& v) {
    return std::sqrt(kern::ops().dot(v.data(), v.data(), v.size()));
}

} // namespace

LerayResult leray_inv_laplacian(const TensorField& F, LerayMode mode,
                                double tol_div, int max_iter) {
    if (F.rank != 2) throw std::invalid_argument("leray solver expects rank 2");
    TensorField Fm = F.to_modal();
    auto plan = Plan::get(F.N);
    const std::size_t n = Fm.n3();
    LerayResult res;
    res.Z = TensorField(F.N, 2, Rep::modal);
    for (int c = 0; c < 9; ++c) {
        const double* src = Fm.comp(c);
        double* dst = res.Z.comp(c);
        for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] / plan->gamma[i];
    }

    std::vector<double> tmp(n), d(n);
    double div2 = 0.0;
    for (int r = 0; r < 3; ++r) {
        const double* z[3] = {res.Z.comp(r * 3), res.Z.comp(r * 3 + 1),
                              res.Z.comp(r * 3 + 2)};
        row_div(*plan, d.data(), z, tmp);
        div2 += kern::ops().dot(d.data(), d.data(), n);
    }
    res.div_norm = std::sqrt(div2);
    if (mode == LerayMode::plain || res.div_norm < tol_div) return res;

    // Schur complement S q = D (1/gamma) D^T q, one pressure per row;
    // CG driven until the corrected row divergence meets tol_div.
    const auto& K = kern::ops();
    const double row_tol = tol_div / std::sqrt(3.0);
    auto apply_S = [&](std::vector<double>& out, const std::vector<double>& q) {
        std::vector<double> gb(n), gg(n);
        std::fill(out.begin(), out.end(), 0.0);
        for (int b = 0; b < 3; ++b) {
            plan->modal_deriv_t(gb.data(), q.data(), b);
            for (std::size_t i = 0; i < n; ++i) gb[i] /= plan->gamma[i];
            plan->modal_deriv(gg.data(), gb.data(), b);
            K.axpy(out.data(), gg.data(), n, 1.0);
        }
    };

    int total_iters = 0;
    div2 = 0.0;
    for (int r = 0; r < 3; ++r) {
        double* zr[3] = {res.Z.comp(r * 3), res.Z.comp(r * 3 + 1),
                         res.Z.comp(r * 3 + 2)};
        const double* zc[3] = {zr[0], zr[1], zr[2]};
        std::vector<double> b(n);
        row_div(*plan, b.data(), zc, tmp);
        K.scale(b.data(), n, -1.0);
        if (l2(b) < row_tol) {
            div2 += kern::ops().dot(b.data(), b.data(), n);
            continue;
        }
        std::vector<double> q(n, 0.0), p = b, rr = b, Sp(n);
        double rho = kern::ops().dot(rr.data(), rr.data(), n);
        int it = 0;
        for (; it < max_iter; ++it) {
            apply_S(Sp, p);
            double alpha = rho / kern::ops().dot(p.data(), Sp.data(), n);
            K.axpy(q.data(), p.data(), n, alpha);
            K.axpy(rr.data(), Sp.data(), n, -alpha);
            double rho2 = kern::ops().dot(rr.data(), rr.data(), n);
            if (std::sqrt(rho2) < row_tol) { ++it; break; }
            K.axpy(p.data(), p.data(), n, rho2 / rho - 1.0); // p *= rho2/rho
            K.axpy(p.data(), rr.data(), n, 1.0);
            rho = rho2;
        }
        total_iters += it;
        if (it >= max_iter)
            throw std::runtime_error("divergence projection did not converge");
        // Z_row += (1/gamma) D^T q
        for (int bax = 0; bax < 3; ++bax) {
            plan->modal_deriv_t(tmp.data(), q.data(), bax);
            for (std::size_t i = 0; i < n; ++i) zr[bax][i] += tmp[i] / plan->gamma[i];
        }
        row_div(*plan, d.data(), zc, tmp);
        div2 += kern::ops().dot(d.data(), d.data(), n);
    }
    res.iters = total_iters;
    res.div_norm = std::sqrt(div2);
    if (res.div_norm >= tol_div)
        throw std::runtime_error("divergence projection stalled above tolerance");
    return res;
}

Norms field_norms(const TensorField& F) {
    auto plan = Plan::get(F.N);
    Norms out;
    TensorField Fm = F.to_modal();
    double l2sq = 0, h1sq = 0;
    for (int c = 0; c < Fm.comps(); ++c) {
        const double* a = Fm.comp(c);
        for (std::size_t i = 0; i < Fm.n3(); ++i) {
            l2sq += a[i] * a[i];
            h1sq += plan->gamma[i] * a[i] * a[i];
        }
    }
    out.L2 = std::sqrt(l2sq);
    out.H1_semi = std::sqrt(h1sq);
    TensorField Fn = (F.rep == Rep::nodal) ? F : F.to_nodal();
    for (double v : Fn.data) out.Linf = std::max(out.Linf, std::abs(v));
    return out;
}

} // namespace vsr

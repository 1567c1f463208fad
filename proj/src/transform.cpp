#include "vsr/transform.hpp"
#include "vsr/kernels.hpp"
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace vsr {

Plan::Plan(int N_) : N(N_), h(M_PI / (N_ + 1)) {
    if (N < 4) throw std::invalid_argument("grid size must be >= 4");
    const double nrm = std::sqrt(2.0 / M_PI);
    B_.resize(std::size_t(N) * N);
    Bf_.resize(B_.size());
    D_.resize(B_.size());
    Dt_.resize(B_.size());
    for (int p = 0; p < N; ++p) {
        double xp = h * (p + 1);
        for (int k = 0; k < N; ++k) {
            B_[p * N + k] = nrm * std::sin((k + 1) * xp);
            D_[p * N + k] = nrm * (k + 1) * std::cos((k + 1) * xp);
        }
    }
    for (std::size_t i = 0; i < B_.size(); ++i) Bf_[i] = h * B_[i];
    for (int p = 0; p < N; ++p)
        for (int k = 0; k < N; ++k) Dt_[k * N + p] = D_[p * N + k];
    // modal derivative: forward transform of the nodal derivative samples
    G_.resize(B_.size());
    Gt_.resize(B_.size());
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            double s = 0.0;
            for (int p = 0; p < N; ++p) s += Bf_[a * N + p] * D_[p * N + b];
            G_[a * N + b] = s;
        }
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) Gt_[b * N + a] = G_[a * N + b];

    gamma.resize(n3());
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
            for (int m = 0; m < N; ++m)
                gamma[(std::size_t(k) * N + l) * N + m] =
                    double((k + 1) * (k + 1) + (l + 1) * (l + 1) + (m + 1) * (m + 1));
}

// out_k = sum_p M[k][p] in_p along the given axis (0=x slowest, 2=z fastest)
void Plan::apply_axis(double* out, const double* in, const double* M,
                      const double* Mt, int axis) const {
    const auto& K = kern::ops();
    const std::size_t n = std::size_t(N);
    std::memset(out, 0, n3() * sizeof(double));
    if (axis == 0) {
        const std::size_t blk = n * n;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t p = 0; p < n; ++p)
                K.axpy(out + k * blk, in + p * blk, blk, M[k * n + p]);
    } else if (axis == 1) {
        for (std::size_t x = 0; x < n; ++x) {
            const double* slab_in = in + x * n * n;
            double* slab_out = out + x * n * n;
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t p = 0; p < n; ++p)
                    K.axpy(slab_out + k * n, slab_in + p * n, n, M[k * n + p]);
        }
    } else {
        // rows of length N contiguous in z: out[k] += in[p] * Mt[p][k]
        const std::size_t rows = n * n;
        for (std::size_t r = 0; r < rows; ++r) {
            const double* ri = in + r * n;
            double* ro = out + r * n;
            for (std::size_t p = 0; p < n; ++p)
                K.axpy(ro, Mt + p * n, n, ri[p]);
        }
    }
}

void Plan::apply3(double* out, const double* in, const double* M,
                  const double* Mt) const {
    std::vector<double> tmp(n3());
    apply_axis(tmp.data(), in, M, Mt, 2);
    apply_axis(out, tmp.data(), M, Mt, 1);
    apply_axis(tmp.data(), out, M, Mt, 0);
    std::memcpy(out, tmp.data(), n3() * sizeof(double));
}

void Plan::forward(double* modal, const double* nodal) const {
    apply3(modal, nodal, Bf_.data(), Bf_.data()); // Bf is symmetric
}

void Plan::inverse(double* nodal, const double* modal) const {
    apply3(nodal, modal, B_.data(), B_.data());
}

void Plan::modal_deriv(double* out, const double* modal, int axis) const {
    apply_axis(out, modal, G_.data(), Gt_.data(), axis);
}

void Plan::modal_deriv_t(double* out, const double* modal, int axis) const {
    apply_axis(out, modal, Gt_.data(), G_.data(), axis);
}

void Plan::deriv_at_nodes(double* nodal, const double* modal, int axis) const {
    // derivative along `axis` at nodes, synthesis along the other two
    std::vector<double> tmp(n3());
    const double* cur = modal;
    double* bufs[2] = {tmp.data(), nodal};
    int w = 0;
    for (int a = 2; a >= 0; --a) {
        double* dst = bufs[w];
        if (a == axis)
            apply_axis(dst, cur, D_.data(), Dt_.data(), a);
        else
            apply_axis(dst, cur, B_.data(), B_.data(), a);
        cur = dst;
        w = 1 - w;
    }
    if (cur != nodal) std::memcpy(nodal, cur, n3() * sizeof(double));
}

std::shared_ptr<const Plan> Plan::get(int N) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const Plan>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& p = cache[N];
    if (!p) p = std::make_shared<Plan>(N);
    return p;
}

} // namespace vsr

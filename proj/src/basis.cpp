#include "vsr/basis.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsr {

TensorBasis assemble_basis(int M_s) {
    if (M_s < 1) throw std::invalid_argument("mode cutoff must be >= 1");
    int K = 2;
    while (K * K * K < M_s) ++K;
    K += 2; // margin so the (gamma,k,l,m) order is correct at the cutoff
    std::vector<ScalarMode> all;
    all.reserve(std::size_t(K) * K * K);
    for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= K; ++l)
            for (int m = 1; m <= K; ++m)
                all.push_back({k, l, m, double(k * k + l * l + m * m)});
    std::sort(all.begin(), all.end(), [](const ScalarMode& a, const ScalarMode& b) {
        if (a.gamma != b.gamma) return a.gamma < b.gamma;
        if (a.k != b.k) return a.k < b.k;
        if (a.l != b.l) return a.l < b.l;
        return a.m < b.m;
    });
    TensorBasis basis;
    basis.M_s = M_s;
    basis.modes.assign(all.begin(), all.begin() + M_s);
    return basis;
}

int TensorBasis::max_wavenumber() const {
    int w = 0;
    for (const auto& sm : modes) w = std::max({w, sm.k, sm.l, sm.m});
    return w;
}

TensorField TensorBasis::sym_mode_field(int i, int N, Rep rep) const {
    const ScalarMode& sm = modes[i / 6];
    if (std::max({sm.k, sm.l, sm.m}) > N)
        throw std::invalid_argument("mode wavenumber exceeds grid");
    TensorField F(N, 2, Rep::modal);
    std::size_t idx = sm.modal_index(N);
    int a = sym_dir[i % 6][0], b = sym_dir[i % 6][1];
    if (a == b) {
        F.comp(3 * a + a)[idx] = 1.0;
    } else {
        F.comp(3 * a + b)[idx] = 1.0 / std::sqrt(2.0);
        F.comp(3 * b + a)[idx] = 1.0 / std::sqrt(2.0);
    }
    return rep == Rep::modal ? F : F.to_nodal();
}

TensorField TensorBasis::skew_mode_field(int j, int N, Rep rep) const {
    const ScalarMode& sm = modes[j / 3];
    if (std::max({sm.k, sm.l, sm.m}) > N)
        throw std::invalid_argument("mode wavenumber exceeds grid");
    TensorField F(N, 2, Rep::modal);
    std::size_t idx = sm.modal_index(N);
    int a = skew_dir[j % 3][0], b = skew_dir[j % 3][1];
    F.comp(3 * a + b)[idx] = 1.0 / std::sqrt(2.0);
    F.comp(3 * b + a)[idx] = -1.0 / std::sqrt(2.0);
    return rep == Rep::modal ? F : F.to_nodal();
}

} // namespace vsr

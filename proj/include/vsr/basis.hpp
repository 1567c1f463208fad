#pragma once
#include "vsr/field.hpp"
#include <vector>

namespace vsr {

struct ScalarMode {
    int k, l, m;  // 1-based wavenumbers
    double gamma; // k^2 + l^2 + m^2

    std::size_t modal_index(int N) const {
        return (std::size_t(k - 1) * N + (l - 1)) * N + (m - 1);
    }
};

// L2-orthonormal matrix-valued eigenmodes: per scalar mode, six symmetric
// directions (three diagonal e_i x e_i, three off-diagonal
// (e_i x e_j + e_j x e_i)/sqrt(2)) and three antisymmetric directions
// (e_i x e_j - e_j x e_i)/sqrt(2).
struct TensorBasis {
    int M_s = 0;
    std::vector<ScalarMode> modes;

    static constexpr int sym_dir[6][2] = {{0, 0}, {1, 1}, {2, 2},
                                          {0, 1}, {0, 2}, {1, 2}};
    static constexpr int skew_dir[3][2] = {{0, 1}, {0, 2}, {1, 2}};

    int n_sym() const { return 6 * M_s; }
    int n_skew() const { return 3 * M_s; }
    double gamma_sym(int i) const { return modes[i / 6].gamma; }
    double gamma_skew(int j) const { return modes[j / 3].gamma; }
    int max_wavenumber() const;

    // materialized rank-2 fields (test/diagnostic use)
    TensorField sym_mode_field(int i, int N, Rep rep = Rep::modal) const;
    TensorField skew_mode_field(int j, int N, Rep rep = Rep::modal) const;
};

// first M_s scalar eigenfunctions ordered by (gamma, k, l, m)
TensorBasis assemble_basis(int M_s);

} // namespace vsr

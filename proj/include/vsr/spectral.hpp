#pragma once
#include "vsr/field.hpp"

namespace vsr {

// Differential calculus on sine-basis fields. All operators accept nodal or
// modal input; output representation is selectable. Derivative index is
// appended: (grad F)_{..a} = d_a F_{..}; divergence and curl act on the last
// (row) index.

TensorField grad_field(const TensorField& F, Rep out_rep = Rep::nodal);
TensorField div_rows(const TensorField& F, Rep out_rep = Rep::nodal);
TensorField curl_rows(const TensorField& F, Rep out_rep = Rep::nodal);
// exact transpose of curl_rows in the modal coefficient dot product; agrees
// with curl_rows to truncation order on smooth fields
TensorField curl_rows_adjoint(const TensorField& F, Rep out_rep = Rep::modal);

// Green propagator of the Dirichlet Laplacian: modal division by gamma
TensorField inv_laplacian_dirichlet(const TensorField& F, Rep out_rep = Rep::modal);

enum class LerayMode { plain, projected };

struct LerayResult {
    TensorField Z;       // modal
    double div_norm = 0; // L2 of row-wise divergence of Z
    int iters = 0;       // CG iterations spent (projected mode)
};

// Row-wise inverse Laplacian constrained (in projected mode) to row-wise
// divergence-free fields. Plain mode just reports the divergence defect;
// projected mode corrects it with a per-row pressure solved by CG on the
// divergence Schur complement until div_norm < tol_div.
LerayResult leray_inv_laplacian(const TensorField& F, LerayMode mode,
                                double tol_div = 1e-8, int max_iter = 500);

struct Norms {
    double L2 = 0, H1_semi = 0, Linf = 0;
};

Norms field_norms(const TensorField& F);

} // namespace vsr

#pragma once
#include "vsr/field.hpp"
#include "vsr/mat3.hpp"

namespace vsr {

struct ProxParams {
    double k = 0.0;      // dislocation threshold, >= 0
    double lambda = 1e-3; // smoothing parameter, in (0,1)
    double alpha = 0.1;  // smallest admissible stretch eigenvalue, > 0

    void validate() const;
};

// resolvent of lambda * d(psi_D) with psi_D(A) = k|A|_F + |A|_F^2/2:
// matrix shrinkage, zero inside the dead zone |B| <= lambda*k
Mat3 psiD_resolvent(const Mat3& B, const ProxParams& p);

// Yosida approximant (B - resolvent)/lambda; the regularized Sigma
Mat3 psiD_yosida(const Mat3& B, const ProxParams& p);

// psi_D itself and its Moreau envelope at smoothing lambda
double psiD_value(const Mat3& A, double k);
double psiD_envelope(const Mat3& B, const ProxParams& p);

// nearest symmetric matrix with all eigenvalues >= alpha
SymMat3 spd_project(const SymMat3& W, double alpha);

// Yosida approximant of the stretch constraint: (W - project(W))/lambda
SymMat3 chi_yosida(const SymMat3& W, const ProxParams& p);

// envelope value of the constraint indicator: |W - project(W)|^2/(2 lambda)
double spd_envelope(const SymMat3& W, const ProxParams& p);

struct EnergyBreakdown {
    double elastic = 0;    // 1/2 ||W - I||^2
    double grad_W = 0;     // 1/2 ||grad W||^2
    double grad_R = 0;     // 1/2 ||grad R||^2, R = exp(Theta)
    double disloc_l1 = 0;  // k * integral |curl Z|
    double disloc_l2 = 0;  // 1/2 ||curl Z||^2
    double indicator = 0;  // smoothed stretch-constraint penalty
    double disloc_env = 0; // smoothed dislocation energy (replaces l1+l2 at lambda>0)

    double total() const {
        return elastic + grad_W + grad_R + disloc_l1 + disloc_l2 + indicator;
    }
};

// free energy of nodal (W, Theta) with dislocation field Z (any rep)
EnergyBreakdown energy_total(const TensorField& W, const TensorField& Theta,
                             const TensorField& Z, const ProxParams& p);

// 1/2 ||Wdot||^2 + 1/2 ||grad Omega||^2
double dissipation_rate(const TensorField& Wdot, const TensorField& Omega);

} // namespace vsr

#pragma once
#include "vsr/convex.hpp"
#include "vsr/field.hpp"
#include <string>
#include <vector>

namespace vsr {

enum class ForceKind { zero, linear_spring, time_ramp, user_table };

// External actions act on the deviation variables (W - I, Theta), so they
// vanish identically at the rest state and are Lipschitz with constant
// |gain| * max|modulation| by construction.
struct ExternalForce {
    ForceKind kind = ForceKind::zero;
    double gain = 0.0;
    double t_ramp = 1.0;                          // time_ramp: linear 0 -> 1 over t_ramp
    std::vector<std::pair<double, double>> table; // user_table: (t, gain), interpolated

    // scalar c(t) with F(A, t) = c(t) * A
    double factor(double t) const;
    double lipschitz_bound() const;

    static std::vector<std::pair<double, double>> load_table_csv(const std::string& path);
};

// c(t) * (W - I), symmetric part kept
TensorField eval_W_ext(const ExternalForce& f, const TensorField& W_nodal, double t);
// c(t) * Theta
TensorField eval_Omega_ext(const ExternalForce& f, const TensorField& Theta_nodal, double t);

struct InternalForces {
    TensorField Pi;     // first Piola stress, R (W - I + chi + Wdot)
    TensorField M;      // 2 Pi W R^T - 2 S
    TensorField S;      // reaction, -Sym(curl(G_div * curl Sigma) W R^T)
    TensorField Sigma;  // regularized dislocation stress
    TensorField X;      // grad W
    TensorField Lambda; // (grad R) R^T + grad Omega
    double sigma_linf = 0.0;
};

// a-posteriori force report at a given state; Omega (= time derivative of
// Theta) may be null, in which case its contribution to Lambda is zero
InternalForces eval_internal_forces(const TensorField& W, const TensorField& Theta,
                                    const TensorField& Wdot, const TensorField& Z,
                                    const ProxParams& p,
                                    const TensorField* Omega = nullptr);

} // namespace vsr

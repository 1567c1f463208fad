#pragma once
#include "vsr/galerkin.hpp"

namespace vsr {

// Zero-threshold limit: the dislocation stress is curl Z itself. Same
// pipeline as System::rhs, no proximal shrinkage; requires params.prox.k == 0.
void rhs_k0(System& sys, const GalerkinState& s, double t,
            std::vector<double>& dx, std::vector<double>& dy,
            RhsAux* aux = nullptr);

RunRecord run_k0(System& sys, const SampleCallback& on_sample = nullptr);

struct ContDepReport {
    std::vector<double> t;
    std::vector<double> lhs;   // stability functional of the trajectory gap
    double rhs0 = 0.0;         // initial-gap functional
    double C_emp = 0.0;        // max_t lhs / rhs0
};

// Runs the zero-threshold system from two initial stretch perturbations and
// measures the continuous-dependence ratio.
ContDepReport cont_dep_experiment(const ModelParams& params,
                                  const std::vector<std::pair<int, double>>& w0_1,
                                  const std::vector<std::pair<int, double>>& w0_2);

} // namespace vsr

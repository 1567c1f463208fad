#pragma once
#include "vsr/galerkin.hpp"
#include <string>

namespace vsr {

struct BudgetSample {
    double t, energy, dissip_cum, work_cum, residual;
};

struct BudgetAudit {
    std::vector<BudgetSample> series;
    double max_residual = 0.0;
    bool ok = true;
};

// energy-balance audit of a completed run: residual = dE + dissipation - work
BudgetAudit audit_budget(const RunRecord& rec, double tol);

struct CompatSample {
    double t, curlz_l2, sigma_linf, deadzone_frac;
};

std::vector<CompatSample> monitor_compatibility(const RunRecord& rec);

struct ReactionReport {
    std::vector<double> lambdas;
    std::vector<double> drifts; // sup_t (||W-I|| + ||Theta||) per lambda
};

// Drives the system from rest with the stationary forcing induced by a
// prescribed internal stress with max norm <= k, and measures the drift the
// regularization lets through, per smoothing parameter.
ReactionReport scenario_reaction(const ModelParams& base, const TensorField& sigma_bar,
                                 const std::vector<double>& lambdas, int workers = 1);

enum class SweepAxis { lambda, k, M_s, dt };

struct SweepTable {
    SweepAxis axis;
    std::vector<double> values;
    std::vector<double> dist_adjacent; // trajectory distance value_i vs value_{i+1}
    std::vector<double> cauchy_ratio;  // dist_{i+1} / dist_i
    std::vector<RunRecord> runs;
};

SweepTable sweep(const ModelParams& base, SweepAxis axis,
                 const std::vector<double>& values, int workers = 1);

// L2-in-time distance of the stretch trajectories (coefficients interpolated
// in time, shorter coefficient vectors zero-padded)
double trajectory_distance(const RunRecord& a, const RunRecord& b);

// output writers shared by the command-line driver
void write_run_csv(const std::string& path, const RunRecord& rec);
void write_plot_script(const std::string& path, const std::string& csv,
                       const std::string& title);

} // namespace vsr

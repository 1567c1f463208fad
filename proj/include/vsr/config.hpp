#pragma once
#include "vsr/galerkin.hpp"
#include <map>
#include <string>

namespace vsr {

// strict key=value configuration: '#' comments, unknown keys rejected
struct RunConfig {
    ModelParams params;
    int snapshot_every = 0; // steps between field snapshots, 0 = off

    std::string experiment; // contdep | sweep | reaction (experiment subcommand)

    // contdep
    double contdep_eps = 1e-2;
    int contdep_mode = 0; // symmetric-mode index perturbed at t = 0

    // sweep
    std::string sweep_axis = "lambda";
    std::vector<double> sweep_values;

    // reaction
    double reaction_scale = 0.5; // prescribed stress magnitude as fraction of k
    std::vector<double> reaction_lambdas;
    std::string reaction_sigma_file; // optional snapshot with the prescribed stress

    static RunConfig load(const std::string& path);
    std::map<std::string, std::string> resolved() const; // for the manifest
};

} // namespace vsr

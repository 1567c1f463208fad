#include "vsr/config.hpp"
#include "vsr/diagnostics.hpp"
#include "vsr/klimit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool verbose() {
    const char* v = std::getenv("VSR_LOG");
    return v && std::strcmp(v, "0") != 0 && *v != '\0';
}

void log(const std::string& msg) {
    if (verbose()) std::fprintf(stderr, "[vsr] %s\n", msg.c_str());
}

json manifest_base(const vsr::RunConfig& cfg, std::uint64_t seed) {
    json j;
    j["config"] = cfg.resolved();
    j["seed"] = seed;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path.string());
    f << j.dump(2) << "\n";
}

int cmd_run(const vsr::RunConfig& cfg, const fs::path& out, std::uint64_t seed) {
    fs::create_directories(out);
    vsr::System sys(cfg.params);
    int snap_id = 0;
    vsr::SampleCallback cb;
    if (cfg.snapshot_every > 0) {
        int every = cfg.snapshot_every;
        double dt = cfg.params.dt;
        cb = [&, every, dt](const vsr::Sample& s, const vsr::GalerkinState& st) {
            int step = int(std::llround(s.t / dt));
            if (step % every != 0) return;
            vsr::SynthFields f = vsr::synth_fields(st, sys.basis(), cfg.params.N);
            char name[64];
            std::snprintf(name, sizeof name, "W_%06d.vsrf", snap_id);
            vsr::write_snapshot((out / name).string(), f.W);
            std::snprintf(name, sizeof name, "Theta_%06d.vsrf", snap_id);
            vsr::write_snapshot((out / name).string(), f.Theta);
            ++snap_id;
        };
    }
    log("starting run");
    vsr::RunRecord rec = sys.run(cb);
    vsr::write_run_csv((out / "timeseries.csv").string(), rec);
    vsr::write_plot_script((out / "plot.gp").string(), "timeseries.csv",
                           "run time series");
    json j = manifest_base(cfg, seed);
    j["steps"] = rec.steps;
    j["samples"] = rec.samples.size();
    const auto& last = rec.samples.back();
    j["summary"] = {{"wdev_l2", last.wdev_l2},
                    {"theta_l2", last.theta_l2},
                    {"energy", last.energy},
                    {"budget_residual", last.residual},
                    {"deadzone_frac", last.aux.deadzone_frac},
                    {"sigma_linf", last.aux.sigma_linf}};
    write_json(out / "manifest.json", j);
    log("run complete");
    return 0;
}

int cmd_contdep(const vsr::RunConfig& cfg, const fs::path& out, std::uint64_t seed,
                int /*workers*/) {
    fs::create_directories(out);
    vsr::ModelParams p = cfg.params;
    p.prox.k = 0.0;
    std::vector<std::pair<int, double>> a = {{cfg.contdep_mode, cfg.contdep_eps}};
    std::vector<std::pair<int, double>> b; // unperturbed partner
    vsr::ContDepReport rep = vsr::cont_dep_experiment(p, a, b);

    std::ofstream f(out / "contdep.csv");
    f << "t,lhs\n";
    for (std::size_t i = 0; i < rep.t.size(); ++i)
        f << rep.t[i] << "," << rep.lhs[i] << "\n";
    json j = manifest_base(cfg, seed);
    j["experiment"] = "contdep";
    j["rhs0"] = rep.rhs0;
    j["C_emp"] = rep.C_emp;
    write_json(out / "manifest.json", j);
    vsr::write_plot_script((out / "plot.gp").string(), "contdep.csv",
                           "continuous dependence");
    std::printf("C_emp = %.6g\n", rep.C_emp);
    return 0;
}

int cmd_sweep(const vsr::RunConfig& cfg, const fs::path& out, std::uint64_t seed,
              int workers) {
    fs::create_directories(out);
    vsr::SweepAxis axis;
    if (cfg.sweep_axis == "lambda") axis = vsr::SweepAxis::lambda;
    else if (cfg.sweep_axis == "k") axis = vsr::SweepAxis::k;
    else if (cfg.sweep_axis == "M_s") axis = vsr::SweepAxis::M_s;
    else if (cfg.sweep_axis == "dt") axis = vsr::SweepAxis::dt;
    else throw std::invalid_argument("unknown sweep axis: " + cfg.sweep_axis);
    if (cfg.sweep_values.size() < 3)
        throw std::invalid_argument("sweep needs at least 3 values");

    vsr::SweepTable tab = vsr::sweep(cfg.params, axis, cfg.sweep_values, workers);
    std::ofstream f(out / "sweep.csv");
    f << "value,dist_to_next,cauchy_ratio\n";
    for (std::size_t i = 0; i < tab.values.size(); ++i) {
        f << tab.values[i] << ",";
        if (i < tab.dist_adjacent.size()) f << tab.dist_adjacent[i];
        f << ",";
        if (i < tab.cauchy_ratio.size()) f << tab.cauchy_ratio[i];
        f << "\n";
    }
    json j = manifest_base(cfg, seed);
    j["experiment"] = "sweep";
    j["axis"] = cfg.sweep_axis;
    j["dist_adjacent"] = tab.dist_adjacent;
    j["cauchy_ratio"] = tab.cauchy_ratio;
    write_json(out / "manifest.json", j);
    std::ofstream g(out / "plot.gp");
    g << "set datafile separator ','\nset key autotitle columnhead\n"
      << "set logscale xy\nplot 'sweep.csv' using 1:2 with linespoints\n";
    return 0;
}

int cmd_reaction(const vsr::RunConfig& cfg, const fs::path& out, std::uint64_t seed,
                 int workers) {
    fs::create_directories(out);
    vsr::ModelParams p = cfg.params;
    vsr::TensorField sigma_bar;
    if (!cfg.reaction_sigma_file.empty()) {
        sigma_bar = vsr::read_snapshot(cfg.reaction_sigma_file).to_nodal();
    } else {
        // lowest-mode prescribed stress scaled to reaction_scale * k
        vsr::TensorBasis b1 = vsr::assemble_basis(1);
        vsr::TensorField mode = b1.sym_mode_field(0, p.N, vsr::Rep::nodal);
        double linf = vsr::field_norms(mode).Linf;
        double target = cfg.reaction_scale * p.prox.k;
        sigma_bar = mode;
        for (double& v : sigma_bar.data) v *= target / linf;
    }
    std::vector<double> lambdas = cfg.reaction_lambdas;
    if (lambdas.empty()) lambdas = {1e-1, 1e-2, 1e-3};
    vsr::ReactionReport rep = vsr::scenario_reaction(p, sigma_bar, lambdas, workers);
    std::ofstream f(out / "reaction.csv");
    f << "lambda,drift\n";
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i)
        f << rep.lambdas[i] << "," << rep.drifts[i] << "\n";
    json j = manifest_base(cfg, seed);
    j["experiment"] = "reaction";
    j["lambdas"] = rep.lambdas;
    j["drifts"] = rep.drifts;
    write_json(out / "manifest.json", j);
    std::ofstream g(out / "plot.gp");
    g << "set datafile separator ','\nset key autotitle columnhead\n"
      << "set logscale xy\nplot 'reaction.csv' using 1:2 with linespoints\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sine-spectral visco-elastic stretch/rotation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", experiment_name;
    int workers = 1;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "integrate one trajectory");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--seed", seed, "random seed");

    CLI::App* exp = app.add_subcommand("experiment", "run a named experiment");
    exp->add_option("name", experiment_name, "contdep | sweep | reaction")->required();
    exp->add_option("--config", config_path, "config file")->required();
    exp->add_option("--out", out_dir, "output directory");
    exp->add_option("--workers", workers, "worker threads");
    exp->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        vsr::RunConfig cfg = vsr::RunConfig::load(config_path);
        if (run->parsed()) return cmd_run(cfg, out_dir, seed);
        if (experiment_name == "contdep") return cmd_contdep(cfg, out_dir, seed, workers);
        if (experiment_name == "sweep") return cmd_sweep(cfg, out_dir, seed, workers);
        if (experiment_name == "reaction") return cmd_reaction(cfg, out_dir, seed, workers);
        std::fprintf(stderr, "unknown experiment: %s\n", experiment_name.c_str());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 1;
    }
}

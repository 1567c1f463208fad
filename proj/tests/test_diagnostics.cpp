#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsr/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace vsr;

namespace {

ModelParams base_params() {
    ModelParams p;
    p.prox = {0.3, 0.1, 0.1};
    p.M_s = 2;
    p.N = 8;
    p.dt = 5e-3;
    p.t_end = 0.2;
    p.sample_every = 4;
    p.w0_modes = {{0, 0.1}};
    return p;
}

} // namespace

TEST_CASE("budget audit summarizes the run residuals") {
    ModelParams p = base_params();
    System sys(p);
    RunRecord rec = sys.run();
    BudgetAudit a = audit_budget(rec, 1e-3);
    REQUIRE(a.series.size() == rec.samples.size());
    CHECK(a.ok);
    double mx = 0;
    for (const auto& s : rec.samples) mx = std::max(mx, std::abs(s.residual));
    CHECK(a.max_residual == doctest::Approx(mx));
    BudgetAudit tight = audit_budget(rec, 0.0);
    CHECK_FALSE(tight.ok); // residuals are small but not exactly zero here

    auto cs = monitor_compatibility(rec);
    REQUIRE(cs.size() == rec.samples.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
        CHECK(cs[i].t == rec.samples[i].t);
        CHECK(cs[i].curlz_l2 == rec.samples[i].aux.curlz_l2);
    }
}

TEST_CASE("trajectory distance is a metric-like gauge") {
    ModelParams p = base_params();
    System a(p);
    RunRecord ra = a.run();
    CHECK(trajectory_distance(ra, ra) == 0.0);

    ModelParams q = p;
    q.w0_modes = {{0, 0.12}};
    System b(q);
    RunRecord rb = b.run();
    double dab = trajectory_distance(ra, rb);
    CHECK(dab > 0.0);
    CHECK(dab == doctest::Approx(trajectory_distance(rb, ra)));

    // different sampling cadences describe the same trajectory
    ModelParams f = p;
    f.sample_every = 1;
    System c(f);
    RunRecord rc = c.run();
    CHECK(trajectory_distance(ra, rc) < 1e-4);
}

TEST_CASE("distances scale linearly with the initial gap at small amplitude") {
    // deep dead zone, tiny amplitudes: the flow is linear (the smoothed
    // stress is curlZ / lambda), so trajectories are proportional to their
    // starts and the L2-in-time distance is proportional to the initial gap
    ModelParams p = base_params();
    p.prox.k = 1e3;
    p.sample_every = 1;
    p.w0_modes = {{0, 0.010}};
    ModelParams q = p, r = p;
    q.w0_modes = {{0, 0.006}};
    r.w0_modes = {{0, 0.008}};
    System sa(p), sb(q), sc(r);
    RunRecord ra = sa.run(), rb = sb.run(), rc = sc.run();
    double dab = trajectory_distance(ra, rb); // gap 0.004
    double dac = trajectory_distance(ra, rc); // gap 0.002
    CHECK(dab > 0.0);
    CHECK(dab / dac == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("parameter sweep produces distances and contraction ratios") {
    ModelParams p = base_params();
    CHECK_THROWS_AS(sweep(p, SweepAxis::dt, {1e-2, 5e-3}, 1), std::invalid_argument);

    SweepTable tab = sweep(p, SweepAxis::dt, {4e-3, 2e-3, 1e-3, 5e-4}, 1);
    REQUIRE(tab.values.size() == 4);
    REQUIRE(tab.runs.size() == 4);
    REQUIRE(tab.dist_adjacent.size() == 3);
    REQUIRE(tab.cauchy_ratio.size() == 2);
    // refining dt contracts the trajectory gaps roughly linearly
    for (double r : tab.cauchy_ratio) CHECK(r < 0.9);

    SweepTable lam = sweep(p, SweepAxis::lambda, {2e-1, 1e-1, 5e-2}, 2);
    REQUIRE(lam.dist_adjacent.size() == 2);
    for (double d : lam.dist_adjacent) CHECK(std::isfinite(d));
}

TEST_CASE("reaction scenario validates its inputs") {
    ModelParams p = base_params();
    TensorBasis b = assemble_basis(1);
    TensorField mode = b.sym_mode_field(0, p.N, Rep::nodal);

    ModelParams nok = p;
    nok.prox.k = 0.0;
    CHECK_THROWS_AS(scenario_reaction(nok, mode, {1e-1}, 1), std::invalid_argument);

    // |sigma_bar| above the threshold is rejected
    TensorField big = mode;
    for (double& v : big.data) v *= 10.0;
    CHECK_THROWS_AS(scenario_reaction(p, big, {1e-1}, 1), std::invalid_argument);

    TensorField wrong(p.N, 1, Rep::nodal);
    CHECK_THROWS_AS(scenario_reaction(p, wrong, {1e-1}, 1), std::invalid_argument);
}

TEST_CASE("sub-threshold prescribed stress leaks less as lambda shrinks") {
    ModelParams p = base_params();
    p.w0_modes.clear();
    p.t_end = 0.3;
    TensorBasis b = assemble_basis(1);
    TensorField mode = b.sym_mode_field(0, p.N, Rep::nodal);
    double linf = field_norms(mode).Linf;
    for (double& v : mode.data) v *= 0.5 * p.prox.k / linf;

    ReactionReport rep = scenario_reaction(p, mode, {1e-1, 1e-2}, 2);
    REQUIRE(rep.drifts.size() == 2);
    CHECK(rep.drifts[0] > 0.0);
    CHECK(rep.drifts[1] < rep.drifts[0]);
}

TEST_CASE("csv writer emits one row per sample") {
    ModelParams p = base_params();
    System sys(p);
    RunRecord rec = sys.run();
    write_run_csv("diag_out.csv", rec);
    std::ifstream f("diag_out.csv");
    REQUIRE(f.good());
    std::string line;
    std::getline(f, line);
    CHECK(line.rfind("t,", 0) == 0);
    std::size_t rows = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    CHECK(rows == rec.samples.size());
    write_plot_script("diag_plot.gp", "diag_out.csv", "test");
    std::ifstream g("diag_plot.gp");
    CHECK(g.good());
    std::remove("diag_out.csv");
    std::remove("diag_plot.gp");
}

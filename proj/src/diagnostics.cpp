#include "vsr/diagnostics.hpp"
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace vsr {

BudgetAudit audit_budget(const RunRecord& rec, double tol) {
    BudgetAudit out;
    for (const auto& s : rec.samples) {
        out.series.push_back({s.t, s.energy, s.dissip_cum, s.work_cum, s.residual});
        out.max_residual = std::max(out.max_residual, std::abs(s.residual));
    }
    out.ok = out.max_residual <= tol;
    return out;
}

std::vector<CompatSample> monitor_compatibility(const RunRecord& rec) {
    std::vector<CompatSample> out;
    for (const auto& s : rec.samples)
        out.push_back({s.t, s.aux.curlz_l2, s.aux.sigma_linf, s.aux.deadzone_frac});
    return out;
}

namespace {

template <class F>
void parallel_over(std::size_t count, int workers, F&& body) {
    workers = std::max(1, std::min<int>(workers, int(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(count);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace

ReactionReport scenario_reaction(const ModelParams& base, const TensorField& sigma_bar,
                                 const std::vector<double>& lambdas, int workers) {
    if (!(base.prox.k > 0.0))
        throw std::invalid_argument("reaction scenario needs a positive threshold k");
    TensorField sb = sigma_bar.to_nodal();
    if (sb.N != base.N || sb.rank != 2)
        throw std::invalid_argument("prescribed stress has wrong shape");
    double linf = 0.0;
    for (std::size_t i = 0; i < sb.n3(); ++i)
        linf = std::max(linf, frob_norm(sb.mat_at(i)));
    if (linf > base.prox.k)
        throw std::invalid_argument("prescribed stress exceeds the threshold k");

    // stationary forcing: curl(G_div * curl sigma_bar), split into its
    // symmetric and antisymmetric actions
    LerayResult prop = leray_inv_laplacian(curl_rows(sb, Rep::modal), base.leray);
    TensorField K = curl_rows(prop.Z, Rep::nodal);
    auto Wf = std::make_shared<TensorField>(base.N, 2, Rep::nodal);
    auto Of = std::make_shared<TensorField>(base.N, 2, Rep::nodal);
    for (std::size_t i = 0; i < K.n3(); ++i) {
        Mat3 A = K.mat_at(i);
        Wf->set_mat(i, sym_part(A));
        Of->set_mat(i, skew_part(A));
    }

    ReactionReport rep;
    rep.lambdas = lambdas;
    rep.drifts.assign(lambdas.size(), 0.0);
    parallel_over(lambdas.size(), workers, [&](std::size_t i) {
        ModelParams p = base;
        p.prox.lambda = lambdas[i];
        // the regularized stress responds with slope 1/lambda inside the
        // dead zone; keep the explicit part of the step inside its
        // stability region
        p.dt = std::min(base.dt, 0.8 * lambdas[i]);
        p.wext_field = Wf;
        p.oext_field = Of;
        p.w0_modes.clear();
        System sys(p);
        RunRecord rec = sys.run();
        double drift = 0.0;
        for (const auto& s : rec.samples)
            drift = std::max(drift, s.wdev_l2 + s.theta_l2);
        rep.drifts[i] = drift;
    });
    return rep;
}

double trajectory_distance(const RunRecord& a, const RunRecord& b) {
    const RunRecord& coarse = a.samples.size() <= b.samples.size() ? a : b;
    const RunRecord& fine = a.samples.size() <= b.samples.size() ? b : a;
    auto interp = [&](double t, std::size_t nx) {
        // linear interpolation of fine-run coefficients at time t
        std::vector<double> out(nx, 0.0);
        const auto& S = fine.samples;
        std::size_t j = 0;
        while (j + 1 < S.size() && S[j + 1].t < t) ++j;
        const auto& s0 = S[j];
        const auto& s1 = S[std::min(j + 1, S.size() - 1)];
        double w1 = (s1.t > s0.t) ? std::clamp((t - s0.t) / (s1.t - s0.t), 0.0, 1.0) : 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            double v0 = i < s0.x.size() ? s0.x[i] : 0.0;
            double v1 = i < s1.x.size() ? s1.x[i] : 0.0;
            out[i] = (1 - w1) * v0 + w1 * v1;
        }
        return out;
    };
    std::size_t nx = std::max(coarse.samples.front().x.size(),
                              fine.samples.front().x.size());
    double integral = 0.0, prev = 0.0, prev_t = 0.0;
    for (std::size_t m = 0; m < coarse.samples.size(); ++m) {
        const auto& sc = coarse.samples[m];
        std::vector<double> xf = interp(sc.t, nx);
        double d2 = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            double vc = i < sc.x.size() ? sc.x[i] : 0.0;
            double d = vc - xf[i];
            d2 += d * d;
        }
        if (m > 0) integral += 0.5 * (sc.t - prev_t) * (prev + d2);
        prev = d2;
        prev_t = sc.t;
    }
    return std::sqrt(integral);
}

SweepTable sweep(const ModelParams& base, SweepAxis axis,
                 const std::vector<double>& values, int workers) {
    if (values.size() < 3)
        throw std::invalid_argument("sweep needs at least 3 values");
    SweepTable tab;
    tab.axis = axis;
    tab.values = values;
    tab.runs.resize(values.size());
    parallel_over(values.size(), workers, [&](std::size_t i) {
        ModelParams p = base;
        switch (axis) {
        case SweepAxis::lambda: p.prox.lambda = values[i]; break;
        case SweepAxis::k: p.prox.k = values[i]; break;
        case SweepAxis::M_s: p.M_s = int(values[i]); break;
        case SweepAxis::dt: p.dt = values[i]; break;
        }
        System sys(p);
        tab.runs[i] = sys.run();
    });
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        tab.dist_adjacent.push_back(trajectory_distance(tab.runs[i], tab.runs[i + 1]));
    for (std::size_t i = 0; i + 1 < tab.dist_adjacent.size(); ++i)
        tab.cauchy_ratio.push_back(
            tab.dist_adjacent[i] > 0 ? tab.dist_adjacent[i + 1] / tab.dist_adjacent[i]
                                     : 0.0);
    return tab;
}

void write_run_csv(const std::string& path, const RunRecord& rec) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "t,wdev_l2,theta_l2,energy,energy_apriori,dissip_cum,work_cum,residual,"
         "curlz_l2,sigma_linf,deadzone_frac,div_norm\n";
    char line[512];
    for (const auto& s : rec.samples) {
        std::snprintf(line, sizeof line,
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      s.t, s.wdev_l2, s.theta_l2, s.energy, s.energy_apriori,
                      s.dissip_cum, s.work_cum, s.residual, s.aux.curlz_l2,
                      s.aux.sigma_linf, s.aux.deadzone_frac, s.aux.div_norm);
        f << line;
    }
}

void write_plot_script(const std::string& path, const std::string& csv,
                       const std::string& title) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << "'\n"
      << "set xlabel 't'\n"
      << "set logscale y\n"
      << "plot '" << csv << "' using 1:2 with lines, '' using 1:3 with lines, "
      << "'' using 1:4 with lines\n";
}

} // namespace vsr

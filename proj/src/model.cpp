#include "vsr/model.hpp"
#include "vsr/spectral.hpp"
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vsr {

double ExternalForce::factor(double t) const {
    switch (kind) {
    case ForceKind::zero:
        return 0.0;
    case ForceKind::linear_spring:
        return gain;
    case ForceKind::time_ramp:
        return gain * std::clamp(t / t_ramp, 0.0, 1.0);
    case ForceKind::user_table: {
        if (table.empty()) return 0.0;
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(),
                                   std::make_pair(t, -1e300));
        auto lo = it - 1;
        double s = (t - lo->first) / (it->first - lo->first);
        return lo->second + s * (it->second - lo->second);
    }
    }
    return 0.0;
}

double ExternalForce::lipschitz_bound() const {
    switch (kind) {
    case ForceKind::zero:
        return 0.0;
    case ForceKind::linear_spring:
    case ForceKind::time_ramp:
        return std::abs(gain);
    case ForceKind::user_table: {
        double L = 0.0;
        for (auto& [t, g] : table) L = std::max(L, std::abs(g));
        return L;
    }
    }
    return 0.0;
}

std::vector<std::pair<double, double>> ExternalForce::load_table_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open force table: " + path);
    std::vector<std::pair<double, double>> tab;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, g;
        if (!(ss >> t >> g)) throw std::invalid_argument("bad force table row: " + line);
        tab.emplace_back(t, g);
    }
    if (!std::is_sorted(tab.begin(), tab.end()))
        throw std::invalid_argument("force table times must increase: " + path);
    return tab;
}

TensorField eval_W_ext(const ExternalForce& f, const TensorField& W_nodal, double t) {
    double c = f.factor(t);
    TensorField out(W_nodal.N, 2, Rep::nodal);
    const std::size_t n = out.n3();
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 Wd = W_nodal.mat_at(i) - Mat3::identity();
        out.set_mat(i, sym_part(Wd) * c);
    }
    return out;
}

TensorField eval_Omega_ext(const ExternalForce& f, const TensorField& Theta_nodal, double t) {
    double c = f.factor(t);
    TensorField out = Theta_nodal;
    for (double& v : out.data) v *= c;
    return out;
}

InternalForces eval_internal_forces(const TensorField& W, const TensorField& Theta,
                                    const TensorField& Wdot, const TensorField& Z,
                                    const ProxParams& p, const TensorField* Omega) {
    p.validate();
    const int N = W.N;
    const std::size_t n = std::size_t(N) * N * N;
    TensorField Wn = W.to_nodal(), Tn = Theta.to_nodal(), Wdn = Wdot.to_nodal();

    InternalForces out;
    out.Sigma = TensorField(N, 2, Rep::nodal);
    TensorField curlZ = curl_rows(Z, Rep::nodal);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 s = psiD_yosida(curlZ.mat_at(i), p);
        out.Sigma.set_mat(i, s);
        out.sigma_linf = std::max(out.sigma_linf, frob_norm(s));
    }

    LerayResult prop = leray_inv_laplacian(curl_rows(out.Sigma, Rep::modal),
                                           LerayMode::plain);
    TensorField K = curl_rows(prop.Z, Rep::nodal);

    out.Pi = TensorField(N, 2, Rep::nodal);
    out.M = TensorField(N, 2, Rep::nodal);
    out.S = TensorField(N, 2, Rep::nodal);
    TensorField Rf(N, 2, Rep::nodal); // rotation, reused for Lambda
    const Mat3 I = Mat3::identity();
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 T = Tn.mat_at(i);
        SkewMat3 th{{T(2, 1), T(0, 2), T(1, 0)}};
        Mat3 R = exp_skew(th);
        Rf.set_mat(i, R);
        Mat3 Wl = Wn.mat_at(i);
        SymMat3 Ws = sym_skew_split(Wl).first;
        Mat3 chi = chi_yosida(Ws, p).full();
        Mat3 Pi = R * (Wl - I + chi + Wdn.mat_at(i));
        Mat3 S = (sym_part(K.mat_at(i) * Wl * R.transpose())) * -1.0;
        out.Pi.set_mat(i, Pi);
        out.S.set_mat(i, S);
        out.M.set_mat(i, Pi * Wl * R.transpose() * 2.0 - S * 2.0);
    }

    // gradients are taken on the deviations from I: the constant has zero
    // derivative but would pollute the sine expansion if kept
    TensorField Wdev = Wn;
    TensorField Rdev = Rf;
    for (int d = 0; d < 3; ++d) {
        double* cw = Wdev.comp(4 * d);
        double* cr = Rdev.comp(4 * d);
        for (std::size_t i = 0; i < n; ++i) {
            cw[i] -= 1.0;
            cr[i] -= 1.0;
        }
    }
    out.X = grad_field(Wdev, Rep::nodal);
    TensorField gradR = grad_field(Rdev, Rep::nodal);
    out.Lambda = TensorField(N, 3, Rep::nodal);
    TensorField gradOm;
    if (Omega) gradOm = grad_field(Omega->to_nodal(), Rep::nodal);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 R = Rf.mat_at(i);
        for (int a = 0; a < 3; ++a) {
            // ((grad R) R^T)_{ij,a} = sum_k d_a R_ik R_jk
            for (int r = 0; r < 3; ++r)
                for (int j = 0; j < 3; ++j) {
                    double s = 0.0;
                    for (int kk = 0; kk < 3; ++kk)
                        s += gradR.comp((3 * r + kk) * 3 + a)[i] * R(j, kk);
                    if (Omega) s += gradOm.comp((3 * r + j) * 3 + a)[i];
                    out.Lambda.comp((3 * r + j) * 3 + a)[i] = s;
                }
        }
    }
    return out;
}

} // namespace vsr

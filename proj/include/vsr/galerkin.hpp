#pragma once
#include "vsr/basis.hpp"
#include "vsr/convex.hpp"
#include "vsr/model.hpp"
#include "vsr/spectral.hpp"
#include <functional>
#include <memory>
#include <vector>

namespace vsr {

enum class Integrator { semi_implicit, rk2_imex };

struct GalerkinState {
    std::vector<double> x; // symmetric-mode coefficients, 6 per scalar mode
    std::vector<double> y; // antisymmetric-mode coefficients, 3 per scalar mode
    double t = 0.0;
};

struct ModelParams {
    ProxParams prox;
    int M_s = 1;
    int N = 16;
    double dt = 1e-3;
    double t_end = 1.0;
    Integrator integrator = Integrator::semi_implicit;
    LerayMode leray = LerayMode::plain;
    bool dealias = false; // 2/3-rule truncation of nodal products
    ExternalForce wext, oext;
    // initial stretch: W0 = I + sum of (sym-mode index, coefficient)
    std::vector<std::pair<int, double>> w0_modes;
    // optional prescribed nodal forcing fields, added on top of the force
    // registry (used by the reaction scenario)
    std::shared_ptr<const TensorField> wext_field, oext_field;
    int sample_every = 10;
    bool reject_on_budget = true;

    void validate() const;
};

struct SynthFields {
    TensorField W, Theta, R; // nodal
};

SynthFields synth_fields(const GalerkinState& s, const TensorBasis& basis, int N);

// kinematic recovery: Z = G_div * curl(exp(Theta) W) (modal),
// and the Dirichlet part of the deformation, phi = Phi - a (modal), with
// Phi = a - G_L * div(exp(Theta) W - I)
LerayResult recover_Z(const TensorField& W, const TensorField& Theta,
                      LerayMode mode = LerayMode::plain);
TensorField recover_Phi(const TensorField& W, const TensorField& Theta);

// per-evaluation scalars that fall out of the pipeline for free
struct RhsAux {
    double psihat_env = 0;   // smoothed stretch-constraint energy
    double psiD_env = 0;     // smoothed dislocation energy of curl Z
    double psiD_l1 = 0;      // k * integral |curl Z|
    double psiD_l2 = 0;      // 1/2 ||curl Z||^2
    double curlz_l2 = 0;
    double sigma_linf = 0;
    double deadzone_frac = 0; // fraction of nodes with |curl Z| <= lambda k
    double div_norm = 0;      // divergence defect of Z
};

struct Sample {
    double t = 0;
    double wdev_l2 = 0, theta_l2 = 0;
    double energy = 0;        // budget energy (no 1/4||Theta||^2 bookkeeping term)
    double energy_apriori = 0; // the a-priori bounded quantity
    double dissip_cum = 0, work_cum = 0, residual = 0;
    RhsAux aux;
    std::vector<double> x, y;
};

struct RunRecord {
    std::vector<Sample> samples;
    GalerkinState final_state;
    int steps = 0;
};

using SampleCallback =
    std::function<void(const Sample&, const GalerkinState&)>;

// Owns one trajectory's working buffers; use one instance per thread.
class System {
public:
    explicit System(const ModelParams& p);

    const ModelParams& params() const { return params_; }
    const TensorBasis& basis() const { return basis_; }

    GalerkinState initial_state() const;

    // coupled ODE right-hand side; with k0 = true the dislocation stress is
    // curl Z itself (no threshold), the zero-threshold limit system
    void rhs(const GalerkinState& s, double t, std::vector<double>& dx,
             std::vector<double>& dy, RhsAux* aux = nullptr, bool k0 = false);

    GalerkinState step(const GalerkinState& s, double dt, bool k0 = false);

    RunRecord run(const SampleCallback& on_sample = nullptr, bool k0 = false);

private:
    ModelParams params_;
    TensorBasis basis_;
    std::shared_ptr<const Plan> plan_;
    std::vector<double> pw_, po_; // basis projection of prescribed forcing

    void stage(const std::vector<double>& xin, const std::vector<double>& yin,
               double t, std::vector<double>& dx, std::vector<double>& dy,
               RhsAux* aux, bool k0);
    void integrating_factor(GalerkinState& s, const std::vector<double>& dx,
                            const std::vector<double>& dy, double dt) const;
};

} // namespace vsr

#pragma once
#include <memory>
#include <vector>

// Collocation transforms for the sine basis on (0,pi)^3 with N interior
// nodes per axis: x_p = pi*(p+1)/(N+1), modes sin((k+1)x) for k=0..N-1,
// normalized to unit L2 norm. Forward/inverse are exact inverses on the
// grid; the quadrature h^3 * sum over nodes integrates mode products
// exactly, so modal coefficients are L2 inner products.
namespace vsr {

class Plan {
public:
    explicit Plan(int N);

    int N;
    double h; // pi/(N+1)
    std::vector<double> gamma; // Laplace eigenvalue per modal index (k^2+l^2+m^2, 1-based modes)

    std::size_t n3() const { return std::size_t(N) * N * N; }

    // scalar fields, layout [x][y][z] with z fastest; out-of-place
    void forward(double* modal, const double* nodal) const;
    void inverse(double* nodal, const double* modal) const;

    // modal -> modal application of d/dx_axis (collocation derivative)
    void modal_deriv(double* out, const double* modal, int axis) const;
    // transpose of modal_deriv (adjoint in the coefficient inner product)
    void modal_deriv_t(double* out, const double* modal, int axis) const;

    // modal -> nodal samples of d/dx_axis
    void deriv_at_nodes(double* nodal, const double* modal, int axis) const;

    static std::shared_ptr<const Plan> get(int N); // cached by N

private:
    // all matrices N*N row-major; *_t are transposes for the z-axis pass
    std::vector<double> B_;   // inverse/synthesis matrix (symmetric)
    std::vector<double> Bf_;  // forward = h * B
    std::vector<double> D_, Dt_;   // nodal derivative evaluation
    std::vector<double> G_, Gt_;   // modal derivative = Bf * D

    void apply_axis(double* out, const double* in, const double* M,
                    const double* Mt, int axis) const;
    void apply3(double* out, const double* in, const double* M,
                const double* Mt) const;
};

} // namespace vsr

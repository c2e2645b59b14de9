#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adia/errors.hpp"

namespace adia {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// max_ij |M_ij - conj(M_ji)|
double hermiticity_residual(const Matrix& m);

enum class ScenarioKind { Amin, LandauZener, Constant, DualDerived, CustomSampled, Custom };

const char* to_string(ScenarioKind kind);

// Driven two-level system H(t) = -eps*sigma_z/2 - V*sin(omega0*t)*sigma_x.
struct AminScenario {
    double epsilon = 1.0;
    double V = 0.01;       // > 0
    double omega0 = 1.0;   // > 0
};

// Hermitian matrix path H(t) on [0, horizon], natural units (hbar = 1).
// Immutable after construction; evaluation is a pure function of (H, t).
class TimeDependentHamiltonian {
  public:
    using Evaluator = std::function<Matrix(double)>;

    TimeDependentHamiltonian() = default;
    TimeDependentHamiltonian(int dim, double horizon, Evaluator evaluate,
                             Evaluator derivative = nullptr,
                             ScenarioKind kind = ScenarioKind::Custom);

    static TimeDependentHamiltonian amin(const AminScenario& s, double horizon);
    // H(t) = v*(t - T/2)*sigma_z/2 + delta*sigma_x
    static TimeDependentHamiltonian landau_zener(double sweep_rate, double gap,
                                                 double horizon);
    static TimeDependentHamiltonian constant(const Matrix& h0, double horizon);
    // Linear entrywise interpolation between Hermitian samples; the derivative
    // is the segment slope.
    static TimeDependentHamiltonian sampled(std::vector<double> times,
                                            std::vector<Matrix> samples);
    // Smooth random path: a fixed-gap diagonal base plus `modes` random
    // Hermitian oscillation terms of the given amplitude. Deterministic in the
    // seed.
    static TimeDependentHamiltonian random_smooth(int dim, std::uint32_t seed,
                                                  double horizon,
                                                  double amplitude = 0.05,
                                                  int modes = 3);

    // Evaluate H(t); checks the domain and the hermiticity residual.
    Matrix operator()(double t) const;

    // dH/dt: analytic when available, otherwise a central finite difference of
    // step fd_step() (one-sided at the domain endpoints).
    Matrix derivative(double t) const;

    int dim() const { return dim_; }
    double horizon() const { return horizon_; }
    ScenarioKind kind() const { return kind_; }
    bool has_analytic_derivative() const { return static_cast<bool>(deriv_); }

    double fd_step() const;
    void set_fd_step(double h) { fd_step_ = h; }
    double hermiticity_tol() const { return herm_tol_; }
    void set_hermiticity_tol(double tol) { herm_tol_ = tol; }

  private:
    double checked_time(double t) const;

    int dim_ = 0;
    double horizon_ = 0.0;
    Evaluator eval_;
    Evaluator deriv_;
    ScenarioKind kind_ = ScenarioKind::Custom;
    double fd_step_ = 0.0;  // 0 -> 1e-6 * horizon
    double herm_tol_ = 1e-12;
};

}  // namespace adia

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adia/spectral.hpp"

namespace adia {

struct PropagatorOptions {
    double dt = 0.0;              // 0 -> auto: 0.05 / max ||H|| over 256 samples
    bool refinement = false;      // step-halving consistency check
    double unitarity_tol = 1e-10;
};

// State trajectory from the Schroedinger equation, with instantaneous-basis
// amplitudes once attach_frames() has projected onto a spectral trajectory.
struct EvolutionResult {
    Eigen::VectorXd grid;
    std::vector<Vector> states;
    Eigen::MatrixXcd amplitudes;  // (level, grid point), a_m(t) = <E_m(t)|psi(t)>
    Eigen::MatrixXd populations;  // |a_m(t)|^2
    double final_fidelity = 0.0;
    int tracked_level = -1;

    bool has_amplitudes() const { return amplitudes.size() != 0; }
    double dt() const { return grid.size() > 1 ? grid(1) - grid(0) : 0.0; }
};

// exp(-i h tau) for Hermitian h, via eigendecomposition; unitary to roundoff.
Matrix expm_hermitian_times(const Matrix& h, double tau);

double default_step(const TimeDependentHamiltonian& h);

// Midpoint-exponential stepper: each step applies exp(-i H(t + dt/2) dt), so
// every intermediate state is unit norm up to roundoff; global error O(dt^2).
EvolutionResult evolve(const TimeDependentHamiltonian& h, const Vector& psi0,
                       const PropagatorOptions& opts = {});

// Final state only, on [0, t_end] with a fixed step count; no storage.
Vector final_state(const TimeDependentHamiltonian& h, const Vector& psi0,
                   double t_end, Eigen::Index steps);

// Accumulated U(T); columns reproduce evolve() from basis initial states.
Matrix evolution_operator(const TimeDependentHamiltonian& h,
                          const PropagatorOptions& opts = {});

// As evolution_operator but U at every grid point t_k, grid returned through
// the out-parameter.
std::vector<Matrix> evolution_operator_path(const TimeDependentHamiltonian& h,
                                            const PropagatorOptions& opts,
                                            Eigen::VectorXd& grid_out);

// a_m(t_k) = <E_m(t_k)|psi(t_k)> on matching grids.
Eigen::MatrixXcd amplitudes_in_instantaneous_basis(const EvolutionResult& result,
                                                   const SpectralTrajectory& traj);

// Fill amplitudes/populations/final_fidelity for the tracked level.
void attach_frames(EvolutionResult& result, const SpectralTrajectory& traj,
                   int tracked_level);

struct ShortTimeDeparture {
    double p_exact = 0.0;      // 1 - |<psi0|psi(t)>|^2 from full propagation
    double p_predicted = 0.0;  // (Delta Hbar)^2 t^2
    bool expansion_valid = true;  // t * Delta Hbar < 0.1
};

// Quadratic short-time law: Hbar is the time average of H over [0, t]
// (Simpson, >= 64 panels); the variance is taken in psi0.
ShortTimeDeparture short_time_departure(const TimeDependentHamiltonian& h,
                                        const Vector& psi0, double t);

}  // namespace adia

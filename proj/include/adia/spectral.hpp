#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adia/hamiltonian.hpp"

namespace adia {

struct SpectralOptions {
    double eig_tol = 1e-10;        // ||H v - E v|| <= eig_tol * ||H||
    double gap_floor_rel = 1e-8;   // reject frames with min_gap <= this * ||H||
    double gauge_tol = 1e-6;
    double tracking_factor = 0.5;  // adjacent-frame eigenvalue jump limit, in min_gap units
    enum class Coupling { Auto, HellmannFeynman, FiniteDifference };
    Coupling coupling = Coupling::Auto;
};

// Instantaneous eigendecomposition of H(t) at one time.
struct SpectralFrame {
    double t = 0.0;
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // column n pairs with eigenvalue n, orthonormal
    double min_gap = 0.0;
};

enum class CouplingMethod { HellmannFeynman, FiniteDifference };

// Gauge-aligned eigenframes along a time grid plus the couplings
// chi[n][m](t) = <E_n(t)|d/dt E_m(t)>, anti-Hermitian with zero diagonal.
struct SpectralTrajectory {
    Eigen::VectorXd grid;
    std::vector<SpectralFrame> frames;
    std::vector<Matrix> couplings;
    CouplingMethod coupling_method = CouplingMethod::HellmannFeynman;

    int dim() const { return frames.empty() ? 0 : static_cast<int>(frames.front().eigenvalues.size()); }
    double horizon() const { return grid.size() ? grid(grid.size() - 1) : 0.0; }
};

Eigen::VectorXd uniform_grid(double t0, double t1, Eigen::Index points);

// Single-time eigenframe with gap check; eigenvalues ascending.
SpectralFrame eigenframe(const Matrix& h, double t, const SpectralOptions& opts = {});

// Rotate each eigenvector's phase so its overlap with the previous frame's
// partner is real and positive (discrete parallel transport, chi_nn = 0).
void align_gauge(SpectralFrame& frame, const SpectralFrame& previous);

// Deterministic gauge for the first frame: largest-magnitude component of
// each column made real positive.
void canonicalize_gauge(SpectralFrame& frame);

// Eigendecompose along the grid, track levels, parallel-transport the gauge,
// and fill couplings (Hellmann-Feynman when an analytic derivative exists,
// finite differences of the eigenvectors otherwise).
SpectralTrajectory decompose(const TimeDependentHamiltonian& h,
                             const Eigen::VectorXd& grid,
                             const SpectralOptions& opts = {});

// chi_nm = <E_n|dH/dt|E_m> / (E_m - E_n) for n != m; zero diagonal.
Matrix coupling_hellmann_feynman(const TimeDependentHamiltonian& h,
                                 const SpectralFrame& frame);

// chi at every grid point from differentiated gauge-aligned eigenvectors;
// central differences inside, second-order one-sided at the ends.
std::vector<Matrix> coupling_finite_difference(const SpectralTrajectory& traj);

}  // namespace adia

#include "adia/propagate.hpp"

#include <cmath>
#include <string>

#include "adia/quadrature.hpp"

namespace adia {

Matrix expm_hermitian_times(const Matrix& h, double tau) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("expm_hermitian_times: eigensolver failed");
    const Eigen::Index d = h.rows();
    Vector phases(d);
    for (Eigen::Index n = 0; n < d; ++n)
        phases(n) = std::exp(Complex(0.0, -tau * solver.eigenvalues()(n)));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

double default_step(const TimeDependentHamiltonian& h) {
    double max_norm = 0.0;
    const int samples = 256;
    for (int k = 0; k <= samples; ++k) {
        const double t = h.horizon() * static_cast<double>(k) / samples;
        max_norm = std::max(max_norm, h(t).norm());
    }
    if (max_norm <= 0.0) return h.horizon() / 64.0;
    return std::min(0.05 / max_norm, h.horizon() / 2.0);
}

namespace {

Eigen::Index step_count(const TimeDependentHamiltonian& h, double dt_req) {
    const double dt = dt_req > 0.0 ? dt_req : default_step(h);
    return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(h.horizon() / dt - 1e-9)));
}

}  // namespace

Vector final_state(const TimeDependentHamiltonian& h, const Vector& psi0,
                   double t_end, Eigen::Index steps) {
    Vector psi = psi0;
    for (Eigen::Index k = 0; k < steps; ++k) {
        const double t0 = t_end * static_cast<double>(k) / static_cast<double>(steps);
        const double t1 = t_end * static_cast<double>(k + 1) / static_cast<double>(steps);
        psi = expm_hermitian_times(h(0.5 * (t0 + t1)), t1 - t0) * psi;
    }
    return psi;
}

EvolutionResult evolve(const TimeDependentHamiltonian& h, const Vector& psi0,
                       const PropagatorOptions& opts) {
    if (psi0.size() != h.dim())
        throw ConfigError("evolve: state dimension does not match the Hamiltonian");
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw NonNormalizedInput("evolve: initial state is not normalized");

    const Eigen::Index steps = step_count(h, opts.dt);
    const double horizon = h.horizon();

    EvolutionResult result;
    result.grid = uniform_grid(0.0, horizon, steps + 1);
    result.states.reserve(static_cast<std::size_t>(steps) + 1);
    result.states.push_back(psi0);
    for (Eigen::Index k = 0; k < steps; ++k) {
        const double mid = horizon * (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
        const double dt = result.grid(k + 1) - result.grid(k);
        result.states.push_back(expm_hermitian_times(h(mid), dt) * result.states.back());
    }

    if (opts.refinement) {
        const Vector fine = final_state(h, psi0, horizon, 2 * steps);
        const double diff = (result.states.back() - fine).norm();
        const double dt = horizon / static_cast<double>(steps);
        if (diff > 10.0 * dt * dt)
            throw StepTooCoarse("step-halving check: final states differ by " +
                                std::to_string(diff) + " at dt = " + std::to_string(dt));
    }
    return result;
}

Matrix evolution_operator(const TimeDependentHamiltonian& h,
                          const PropagatorOptions& opts) {
    const Eigen::Index steps = step_count(h, opts.dt);
    const double horizon = h.horizon();
    Matrix u = Matrix::Identity(h.dim(), h.dim());
    for (Eigen::Index k = 0; k < steps; ++k) {
        const double t0 = horizon * static_cast<double>(k) / static_cast<double>(steps);
        const double t1 = horizon * static_cast<double>(k + 1) / static_cast<double>(steps);
        u = expm_hermitian_times(h(0.5 * (t0 + t1)), t1 - t0) * u;
    }
    const double unit_residual =
        (u.adjoint() * u - Matrix::Identity(h.dim(), h.dim())).norm();
    if (unit_residual > opts.unitarity_tol)
        throw NumericalError("evolution_operator: unitarity residual " +
                             std::to_string(unit_residual) + " exceeds tolerance");
    return u;
}

std::vector<Matrix> evolution_operator_path(const TimeDependentHamiltonian& h,
                                            const PropagatorOptions& opts,
                                            Eigen::VectorXd& grid_out) {
    const Eigen::Index steps = step_count(h, opts.dt);
    const double horizon = h.horizon();
    grid_out = uniform_grid(0.0, horizon, steps + 1);
    std::vector<Matrix> path;
    path.reserve(static_cast<std::size_t>(steps) + 1);
    path.push_back(Matrix::Identity(h.dim(), h.dim()));
    for (Eigen::Index k = 0; k < steps; ++k) {
        const double mid = horizon * (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
        const double dt = grid_out(k + 1) - grid_out(k);
        path.push_back(expm_hermitian_times(h(mid), dt) * path.back());
    }
    return path;
}

Eigen::MatrixXcd amplitudes_in_instantaneous_basis(const EvolutionResult& result,
                                                   const SpectralTrajectory& traj) {
    if (result.grid.size() != traj.grid.size())
        throw GridMismatch("amplitudes: state and spectral grids differ in size");
    const double scale = 1.0 + std::abs(result.grid(result.grid.size() - 1));
    for (Eigen::Index k = 0; k < result.grid.size(); ++k)
        if (std::abs(result.grid(k) - traj.grid(k)) > 1e-12 * scale)
            throw GridMismatch("amplitudes: state and spectral grids differ");

    const int d = traj.dim();
    Eigen::MatrixXcd a(d, result.grid.size());
    for (Eigen::Index k = 0; k < result.grid.size(); ++k)
        a.col(k) = traj.frames[static_cast<std::size_t>(k)].eigenvectors.adjoint() *
                   result.states[static_cast<std::size_t>(k)];
    return a;
}

void attach_frames(EvolutionResult& result, const SpectralTrajectory& traj,
                   int tracked_level) {
    if (tracked_level < 0 || tracked_level >= traj.dim())
        throw ConfigError("attach_frames: tracked level out of range");
    result.amplitudes = amplitudes_in_instantaneous_basis(result, traj);
    result.populations = result.amplitudes.cwiseAbs2();
    result.tracked_level = tracked_level;
    result.final_fidelity = result.populations(tracked_level, result.grid.size() - 1);
}

ShortTimeDeparture short_time_departure(const TimeDependentHamiltonian& h,
                                        const Vector& psi0, double t) {
    if (t < 0.0 || t > h.horizon() * (1.0 + 1e-12))
        throw TimeOutOfDomain("short_time_departure: time outside the domain");
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw NonNormalizedInput("short_time_departure: initial state not normalized");

    ShortTimeDeparture out;
    if (t == 0.0) return out;

    const Matrix hbar = simpson([&](double s) { return h(s); }, 0.0, t, 64) * (1.0 / t);
    const Vector hpsi = hbar * psi0;
    const double mean = psi0.dot(hpsi).real();
    const double mean_sq = hpsi.squaredNorm();
    const double variance = std::max(0.0, mean_sq - mean * mean);
    out.p_predicted = variance * t * t;
    out.expansion_valid = t * std::sqrt(variance) < 0.1;

    const Vector psi_t = final_state(h, psi0, t, 128);
    const double overlap = std::norm(psi0.dot(psi_t));
    out.p_exact = std::max(0.0, 1.0 - overlap);
    return out;
}

}  // namespace adia

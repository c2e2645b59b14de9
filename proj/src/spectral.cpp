#include "adia/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace adia {

Eigen::VectorXd uniform_grid(double t0, double t1, Eigen::Index points) {
    if (points < 2) throw InsufficientGrid("uniform_grid: need at least two points");
    Eigen::VectorXd g(points);
    for (Eigen::Index k = 0; k < points; ++k)
        g(k) = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
    return g;
}

SpectralFrame eigenframe(const Matrix& h, double t, const SpectralOptions& opts) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenframe: eigensolver failed at t = " + std::to_string(t));

    SpectralFrame frame;
    frame.t = t;
    frame.eigenvalues = solver.eigenvalues();
    frame.eigenvectors = solver.eigenvectors();

    const double hnorm = h.norm();
    frame.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 1; n < frame.eigenvalues.size(); ++n)
        frame.min_gap =
            std::min(frame.min_gap, frame.eigenvalues(n) - frame.eigenvalues(n - 1));
    if (frame.eigenvalues.size() > 1 && frame.min_gap <= opts.gap_floor_rel * hnorm)
        throw DegenerateSpectrum("eigenvalue gap " + std::to_string(frame.min_gap) +
                                 " below floor at t = " + std::to_string(t));

    const double residual =
        (h * frame.eigenvectors - frame.eigenvectors * frame.eigenvalues.asDiagonal())
            .norm();
    if (residual > opts.eig_tol * std::max(hnorm, 1e-300))
        throw NumericalError("eigenframe: residual " + std::to_string(residual) +
                             " exceeds tolerance at t = " + std::to_string(t));
    return frame;
}

void canonicalize_gauge(SpectralFrame& frame) {
    for (Eigen::Index n = 0; n < frame.eigenvectors.cols(); ++n) {
        Eigen::Index imax = 0;
        frame.eigenvectors.col(n).cwiseAbs().maxCoeff(&imax);
        const Complex pivot = frame.eigenvectors(imax, n);
        if (std::abs(pivot) > 0.0)
            frame.eigenvectors.col(n) *= std::conj(pivot) / std::abs(pivot);
    }
}

void align_gauge(SpectralFrame& frame, const SpectralFrame& previous) {
    for (Eigen::Index n = 0; n < frame.eigenvectors.cols(); ++n) {
        const Complex overlap =
            previous.eigenvectors.col(n).dot(frame.eigenvectors.col(n));
        if (std::abs(overlap) < 0.1)
            throw LevelTrackingLost(
                "eigenvector overlap collapsed between frames at t = " +
                std::to_string(frame.t));
        frame.eigenvectors.col(n) *= std::conj(overlap) / std::abs(overlap);
    }
}

Matrix coupling_hellmann_feynman(const TimeDependentHamiltonian& h,
                                 const SpectralFrame& frame) {
    Matrix hdot = h.derivative(frame.t);
    const Matrix w = frame.eigenvectors.adjoint() * hdot * frame.eigenvectors;
    const Eigen::Index d = frame.eigenvalues.size();
    Matrix chi = Matrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = n + 1; m < d; ++m) {
            const double gap = frame.eigenvalues(m) - frame.eigenvalues(n);
            const Complex w_sym = 0.5 * (w(n, m) + std::conj(w(m, n)));
            chi(n, m) = w_sym / gap;
            chi(m, n) = -std::conj(chi(n, m));  // anti-Hermitian by construction
        }
    }
    return chi;
}

std::vector<Matrix> coupling_finite_difference(const SpectralTrajectory& traj) {
    const std::size_t count = traj.frames.size();
    if (count < 3)
        throw InsufficientGrid("coupling_finite_difference: need at least three frames");
    const int d = traj.dim();
    std::vector<Matrix> chis(count);
    auto vecs = [&](std::size_t k) -> const Matrix& { return traj.frames[k].eigenvectors; };
    for (std::size_t k = 0; k < count; ++k) {
        Matrix dv(d, d);
        if (k == 0) {
            const double h2 = traj.grid(2) - traj.grid(0);
            dv = (-3.0 * vecs(0) + 4.0 * vecs(1) - vecs(2)) / h2;
        } else if (k == count - 1) {
            const double h2 = traj.grid(k) - traj.grid(k - 2);
            dv = (3.0 * vecs(k) - 4.0 * vecs(k - 1) + vecs(k - 2)) / h2;
        } else {
            dv = (vecs(k + 1) - vecs(k - 1)) / (traj.grid(k + 1) - traj.grid(k - 1));
        }
        chis[k] = vecs(k).adjoint() * dv;
    }
    return chis;
}

SpectralTrajectory decompose(const TimeDependentHamiltonian& h,
                             const Eigen::VectorXd& grid,
                             const SpectralOptions& opts) {
    if (grid.size() < 2) throw InsufficientGrid("decompose: need at least two grid points");
    for (Eigen::Index k = 1; k < grid.size(); ++k)
        if (!(grid(k) > grid(k - 1)))
            throw ConfigError("decompose: grid must be strictly increasing");

    SpectralTrajectory traj;
    traj.grid = grid;
    traj.frames.reserve(static_cast<std::size_t>(grid.size()));

    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        SpectralFrame frame = eigenframe(h(grid(k)), grid(k), opts);
        if (k == 0) {
            canonicalize_gauge(frame);
        } else {
            const SpectralFrame& prev = traj.frames.back();
            const double limit =
                opts.tracking_factor * std::min(prev.min_gap, frame.min_gap);
            const double jump =
                (frame.eigenvalues - prev.eigenvalues).cwiseAbs().maxCoeff();
            if (jump >= limit)
                throw LevelTrackingLost("eigenvalue jump " + std::to_string(jump) +
                                        " exceeds tracking threshold between t = " +
                                        std::to_string(prev.t) + " and t = " +
                                        std::to_string(frame.t));
            align_gauge(frame, prev);
        }
        traj.frames.push_back(std::move(frame));
    }

    const bool use_hf =
        opts.coupling == SpectralOptions::Coupling::HellmannFeynman ||
        (opts.coupling == SpectralOptions::Coupling::Auto && h.has_analytic_derivative());
    if (use_hf) {
        traj.coupling_method = CouplingMethod::HellmannFeynman;
        traj.couplings.reserve(traj.frames.size());
        for (const SpectralFrame& frame : traj.frames)
            traj.couplings.push_back(coupling_hellmann_feynman(h, frame));
    } else {
        traj.coupling_method = CouplingMethod::FiniteDifference;
        traj.couplings = coupling_finite_difference(traj);
    }
    return traj;
}

}  // namespace adia

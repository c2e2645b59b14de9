#include "adia/dual.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "adia/quadrature.hpp"

namespace adia {

DualSystem::DualSystem(TimeDependentHamiltonian h_a, const PropagatorOptions& opts)
    : h_a_(std::move(h_a)) {
    u_a_ = std::make_shared<std::vector<Matrix>>(
        evolution_operator_path(h_a_, opts, grid_));

    if (opts.refinement) {
        PropagatorOptions halved = opts;
        halved.refinement = false;
        halved.dt = dt() / 2.0;
        Eigen::VectorXd fine_grid;
        const std::vector<Matrix> fine = evolution_operator_path(h_a_, halved, fine_grid);
        const double diff = (u_a_->back() - fine.back()).norm();
        const double step = dt();
        if (diff > 10.0 * step * step * std::sqrt(static_cast<double>(h_a_.dim())))
            throw StepTooCoarse("build_dual: refinement disagreement " +
                                std::to_string(diff) + " at dt = " + std::to_string(step));
    }

    // Capture by value; the dual Hamiltonian owns its U_A table.
    const TimeDependentHamiltonian base = h_a_;
    const Eigen::VectorXd grid = grid_;
    const std::shared_ptr<const std::vector<Matrix>> table = u_a_;
    const double step = dt();
    auto u_at = [base, grid, table, step](double t) {
        const Eigen::Index last = grid.size() - 1;
        Eigen::Index k = static_cast<Eigen::Index>(std::floor(t / step));
        k = std::max<Eigen::Index>(0, std::min(k, last));
        double delta = t - grid(k);
        if (delta < 1e-14 * grid(last)) return (*table)[static_cast<std::size_t>(k)];
        if (k == last) {  // roundoff past the end
            return (*table)[static_cast<std::size_t>(last)];
        }
        return (expm_hermitian_times(base(grid(k) + delta / 2.0), delta) *
                (*table)[static_cast<std::size_t>(k)])
            .eval();
    };
    auto value = [base, u_at](double t) {
        const Matrix u = u_at(t);
        return (-(u.adjoint() * base(t) * u)).eval();
    };
    h_b_ = TimeDependentHamiltonian(base.dim(), base.horizon(), value, nullptr,
                                    ScenarioKind::DualDerived);
}

Matrix DualSystem::u_a_at(double t) const {
    const Eigen::Index last = grid_.size() - 1;
    if (t < -1e-12 * grid_(last) || t > grid_(last) * (1.0 + 1e-12))
        throw TimeOutOfDomain("u_a_at: time outside the propagation domain");
    Eigen::Index k = static_cast<Eigen::Index>(std::floor(t / dt()));
    k = std::max<Eigen::Index>(0, std::min(k, last));
    const double delta = t - grid_(k);
    if (delta < 1e-14 * grid_(last) || k == last)
        return (*u_a_)[static_cast<std::size_t>(k)];
    return expm_hermitian_times(h_a_(grid_(k) + delta / 2.0), delta) *
           (*u_a_)[static_cast<std::size_t>(k)];
}

DualSystem build_dual(const TimeDependentHamiltonian& h_a,
                      const PropagatorOptions& opts) {
    return DualSystem(h_a, opts);
}

DualSpectrumResiduals verify_spectrum_and_states(const DualSystem& dual,
                                                 const Eigen::VectorXd& grid,
                                                 const SpectralOptions& opts) {
    const SpectralTrajectory traj_a = decompose(dual.h_a(), grid, opts);
    const SpectralTrajectory traj_b = decompose(dual.h_b(), grid, opts);
    const int d = traj_a.dim();

    DualSpectrumResiduals res;
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const SpectralFrame& fa = traj_a.frames[static_cast<std::size_t>(k)];
        const SpectralFrame& fb = traj_b.frames[static_cast<std::size_t>(k)];
        const Matrix u_dag = dual.u_a_at(grid(k)).adjoint();
        for (int n = 0; n < d; ++n) {
            const int pair = d - 1 - n;
            res.spectrum_negation = std::max(
                res.spectrum_negation,
                std::abs(fb.eigenvalues(pair) + fa.eigenvalues(n)));
            const double overlap =
                std::abs(fb.eigenvectors.col(pair).dot(u_dag * fa.eigenvectors.col(n)));
            res.eigenstate_map = std::max(res.eigenstate_map, 1.0 - overlap);
        }
    }
    return res;
}

double verify_evolution_inverse(const DualSystem& dual, const PropagatorOptions& opts) {
    const Matrix u_b = evolution_operator(dual.h_b(), opts);
    const Matrix u_a = dual.u_a_grid().back();
    const Eigen::Index d = u_a.rows();
    return (u_b * u_a - Matrix::Identity(d, d)).norm();
}

double coupling_relation_check(const DualSystem& dual, const Eigen::VectorXd& grid,
                               double fd_step) {
    const TimeDependentHamiltonian& h_a = dual.h_a();
    const int d = h_a.dim();
    double worst = 0.0;

    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const double t = grid(g);
        if (t - fd_step < 0.0 || t + fd_step > h_a.horizon()) continue;

        // Three gauge-continuous A-frames straddling t.
        const Eigen::VectorXd stencil = uniform_grid(t - fd_step, t + fd_step, 3);
        const SpectralTrajectory local = decompose(h_a, stencil);
        const Matrix u_minus = dual.u_a_at(stencil(0)).adjoint();
        const Matrix u_mid = dual.u_a_at(stencil(1)).adjoint();
        const Matrix u_plus = dual.u_a_at(stencil(2)).adjoint();

        // Eigenstate-map gauge on the B side.
        const Matrix b_minus = u_minus * local.frames[0].eigenvectors;
        const Matrix b_mid = u_mid * local.frames[1].eigenvectors;
        const Matrix b_plus = u_plus * local.frames[2].eigenvectors;

        const Matrix db = (b_plus - b_minus) / (2.0 * fd_step);
        const Matrix da =
            (local.frames[2].eigenvectors - local.frames[0].eigenvectors) /
            (2.0 * fd_step);
        const Matrix lhs = b_mid.adjoint() * db;
        Matrix rhs = local.frames[1].eigenvectors.adjoint() * da;
        for (int n = 0; n < d; ++n)
            rhs(n, n) += Complex(0.0, 1.0) * local.frames[1].eigenvalues(n);

        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

PiPhaseResidual pi_phase_residual(const TimeDependentHamiltonian& h_a, int n, int k,
                                  double t) {
    if (n == k) throw ConfigError("pi_phase_residual: need two distinct levels");
    const Eigen::Index points = 1025;
    const SpectralTrajectory traj = decompose(h_a, uniform_grid(0.0, t, points));
    Eigen::VectorXd gap(points);
    for (Eigen::Index i = 0; i < points; ++i)
        gap(i) = traj.frames[static_cast<std::size_t>(i)].eigenvalues(n) -
                 traj.frames[static_cast<std::size_t>(i)].eigenvalues(k);
    PiPhaseResidual out;
    out.value = simpson_series(gap, t / static_cast<double>(points - 1));
    out.nearest_q = std::lround(out.value / M_PI);
    out.residual = std::abs(out.value - static_cast<double>(out.nearest_q) * M_PI);
    return out;
}

}  // namespace adia

#include "doctest.h"

#include <cmath>

#include "adia/dual.hpp"

using namespace adia;

namespace {

TimeDependentHamiltonian constant_diag(double horizon) {
    Matrix h0 = Matrix::Zero(2, 2);
    h0(0, 0) = Complex(-0.5, 0);
    h0(1, 1) = Complex(0.5, 0);
    return TimeDependentHamiltonian::constant(h0, horizon);
}

PropagatorOptions with_dt(double dt) {
    PropagatorOptions opts;
    opts.dt = dt;
    return opts;
}

}  // namespace

TEST_CASE("commuting constant case: the dual is the negated Hamiltonian") {
    const auto dual = build_dual(constant_diag(4.0), with_dt(0.01));
    for (double t : {0.0, 1.3, 2.7, 4.0}) {
        const Matrix hb = dual.h_b()(t);
        CHECK(hb(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(hb(1, 1).real() == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(std::abs(hb(0, 1)) <= 1e-12);
    }
}

TEST_CASE("commuting constant case: all residuals at roundoff") {
    const auto dual = build_dual(constant_diag(4.0), with_dt(0.01));
    const auto grid = uniform_grid(0.0, 4.0, 41);
    const auto spectrum = verify_spectrum_and_states(dual, grid);
    CHECK(spectrum.spectrum_negation <= 1e-10);
    CHECK(spectrum.eigenstate_map <= 1e-10);
    CHECK(verify_evolution_inverse(dual, with_dt(0.01)) <= 1e-10);
}

TEST_CASE("commuting constant case: coupling relation gives i E_n on the diagonal") {
    // d/dt (U^dag v_n) = i E_n^A U^dag v_n when everything commutes, so the
    // closed-form lhs is i E_n^A exactly; off-diagonal entries vanish
    const auto dual = build_dual(constant_diag(4.0), with_dt(0.01));
    CHECK(coupling_relation_check(dual, uniform_grid(0.5, 3.5, 7)) <= 1e-10);
}

TEST_CASE("amin dual negates the analytic spectrum") {
    const auto h = TimeDependentHamiltonian::amin({1.0, 0.01, 1.0}, 10.0);
    const auto dual = build_dual(h, with_dt(1e-3));
    const auto grid = uniform_grid(0.0, 10.0, 101);
    const auto traj_b = decompose(dual.h_b(), grid);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const double s = 0.01 * std::sin(grid(k));
        const double omega = std::sqrt(1.0 + 4.0 * s * s);
        CHECK(traj_b.frames[k].eigenvalues(0) ==
              doctest::Approx(-omega / 2.0).epsilon(1e-8));
        CHECK(traj_b.frames[k].eigenvalues(1) ==
              doctest::Approx(omega / 2.0).epsilon(1e-8));
    }
    const auto residuals = verify_spectrum_and_states(dual, grid);
    CHECK(residuals.spectrum_negation <= 1e-8);
    CHECK(residuals.eigenstate_map <= 1e-8);
}

TEST_CASE("random systems: spectra of A and B cancel pairwise") {
    const auto h = TimeDependentHamiltonian::random_smooth(3, 21, 5.0, 0.2);
    const auto dual = build_dual(h, with_dt(2e-3));
    const auto grid = uniform_grid(0.0, 5.0, 21);
    const auto traj_a = decompose(h, grid);
    const auto traj_b = decompose(dual.h_b(), grid);
    for (Eigen::Index k = 0; k < grid.size(); ++k)
        for (int n = 0; n < 3; ++n)
            CHECK(traj_b.frames[k].eigenvalues(2 - n) +
                      traj_a.frames[k].eigenvalues(n) ==
                  doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("U_B U_A converges to the identity at second order") {
    const auto h = TimeDependentHamiltonian::amin({1.0, 0.01, 1.0}, 10.0);
    double previous = 0.0;
    for (int level = 0; level < 3; ++level) {
        const double dt = 1e-3 / std::pow(2.0, level);
        const double residual =
            verify_evolution_inverse(build_dual(h, with_dt(dt)), with_dt(dt));
        CHECK(residual <= 1e-5);
        if (level > 0) {
            const double factor = previous / residual;
            CHECK(factor >= 3.0);
            CHECK(factor <= 5.0);
        }
        previous = residual;
    }
}

TEST_CASE("T = 0 leaves nothing to invert") {
    // a single full-horizon step: U_B U_A - I only sees the two exponentials
    const auto h = constant_diag(1e-9);
    const auto dual = build_dual(h, with_dt(1e-9));
    CHECK(verify_evolution_inverse(dual, with_dt(1e-9)) <= 1e-12);
}

TEST_CASE("amin coupling relation holds at finite difference accuracy") {
    const auto h = TimeDependentHamiltonian::amin({1.0, 0.01, 1.0}, 10.0);
    const auto dual = build_dual(h, with_dt(1e-3));
    CHECK(coupling_relation_check(dual, uniform_grid(0.5, 9.5, 19)) <= 1e-5);
}

TEST_CASE("random coupling relation residual shrinks with dt") {
    const auto h = TimeDependentHamiltonian::random_smooth(3, 33, 4.0, 0.15);
    const auto grid = uniform_grid(0.4, 3.6, 9);
    const double coarse = coupling_relation_check(build_dual(h, with_dt(4e-3)), grid);
    const double fine = coupling_relation_check(build_dual(h, with_dt(1e-3)), grid);
    CHECK(coarse <= 1e-4);
    CHECK(fine <= coarse / 4.0 + 1e-9);
}

TEST_CASE("dual of the dual recovers the original spectrum") {
    const auto h = TimeDependentHamiltonian::random_smooth(3, 8, 3.0, 0.2);
    const auto once = build_dual(h, with_dt(2e-3));
    const auto twice = build_dual(once.h_b(), with_dt(2e-3));
    const auto grid = uniform_grid(0.0, 3.0, 16);
    const auto traj_orig = decompose(h, grid);
    const auto traj_back = decompose(twice.h_b(), grid);
    for (Eigen::Index k = 0; k < grid.size(); ++k)
        CHECK((traj_back.frames[k].eigenvalues - traj_orig.frames[k].eigenvalues)
                  .cwiseAbs()
                  .maxCoeff() <= 1e-6);
}

TEST_CASE("dual Hamiltonian stays Hermitian everywhere") {
    const auto h = TimeDependentHamiltonian::random_smooth(4, 13, 3.0, 0.25);
    const auto dual = build_dual(h, with_dt(2e-3));
    for (int k = 0; k <= 60; ++k) {
        const double t = 3.0 * k / 60.0;
        CHECK(hermiticity_residual(dual.h_b()(t)) <= 1e-10);
    }
}

TEST_CASE("pi-phase residual arithmetic on constant gaps") {
    const auto h = constant_diag(2.0 * M_PI);  // gap 1
    const auto at_pi = pi_phase_residual(h, 1, 0, M_PI);
    CHECK(at_pi.value == doctest::Approx(M_PI).epsilon(1e-10));
    CHECK(at_pi.nearest_q == 1);
    CHECK(at_pi.residual <= 1e-10);

    const auto at_one = pi_phase_residual(h, 1, 0, 1.0);
    CHECK(at_one.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(at_one.nearest_q == 0);
    CHECK(at_one.residual == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pi-phase residual for the resonant amin horizon") {
    const auto h = TimeDependentHamiltonian::amin({1.0, 0.01, 1.0}, M_PI / 0.01);
    const auto p = pi_phase_residual(h, 1, 0, M_PI / 0.01);
    // integral of Omega over [0, 100 pi]: 100 pi times the mean of
    // sqrt(1 + 4e-4 sin^2 t), about 314.19
    CHECK(p.value == doctest::Approx(100.0 * M_PI * 1.00009999).epsilon(1e-6));
    CHECK(p.nearest_q == 100);
}

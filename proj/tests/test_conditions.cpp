#include "doctest.h"

#include <cmath>

#include "adia/conditions.hpp"

using namespace adia;

namespace {

struct Run {
    TimeDependentHamiltonian h;
    EvolutionResult evolution;
    SpectralTrajectory trajectory;
};

Run run_scenario(TimeDependentHamiltonian h, int level, double dt) {
    PropagatorOptions opts;
    opts.dt = dt;
    SpectralFrame frame0 = eigenframe(h(0.0), 0.0);
    canonicalize_gauge(frame0);
    Run run{std::move(h), {}, {}};
    run.evolution = evolve(run.h, frame0.eigenvectors.col(level), opts);
    run.trajectory = decompose(run.h, run.evolution.grid);
    attach_frames(run.evolution, run.trajectory, level);
    return run;
}

TimeDependentHamiltonian amin(double eps, double V, double w0, double horizon) {
    return TimeDependentHamiltonian::amin({eps, V, w0}, horizon);
}

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = Complex(a, 0);
    m(1, 1) = Complex(b, 0);
    return m;
}

}  // namespace

TEST_CASE("traditional ratio vanishes for constant H and is symmetric") {
    const auto h = TimeDependentHamiltonian::constant(diag2(-0.5, 0.5), 3.0);
    const auto traj = decompose(h, uniform_grid(0.0, 3.0, 61));
    const auto report = traditional_ratio(traj);
    CHECK(report.max == doctest::Approx(0.0));

    // r_nm = r_mn pointwise: |chi| is symmetric for an anti-Hermitian chi and
    // the gap is symmetric by construction
    const auto amin_traj =
        decompose(amin(1.0, 0.01, 1.0, 10.0), uniform_grid(0.0, 10.0, 1001));
    for (std::size_t k = 0; k < amin_traj.couplings.size(); ++k) {
        const Matrix& chi = amin_traj.couplings[k];
        CHECK(std::abs(chi(0, 1)) == doctest::Approx(std::abs(chi(1, 0))).epsilon(1e-12));
    }
}

TEST_CASE("traditional ratio peaks at V w0 / eps^2 for the amin scenario") {
    const double horizon = M_PI / 0.01;
    const auto traj = decompose(amin(1.0, 0.01, 1.0, horizon),
                                uniform_grid(0.0, horizon, 31416));
    const auto report = traditional_ratio(traj);
    CHECK(report.max == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(report.argmax_n == 0);
    CHECK(report.argmax_m == 1);
}

TEST_CASE("constant-gap rotation gives a flat ratio series") {
    // eigenvectors rotating at theta_dot over a constant gap of 2
    auto rot = [](double t) {
        const double th = 0.3 + 0.2 * t;
        Eigen::Matrix2d r;
        r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Eigen::Matrix2d d = Eigen::Vector2d(-1.0, 1.0).asDiagonal();
        return Matrix((r * d * r.transpose()).cast<Complex>());
    };
    TimeDependentHamiltonian h(2, 2.0, rot);
    const auto traj = decompose(h, uniform_grid(0.0, 2.0, 401));
    const auto report = traditional_ratio(traj);
    for (Eigen::Index k = 0; k < report.pairs[0].values.size(); ++k)
        CHECK(report.pairs[0].values(k) == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("sufficient quantity integrates the worst coupling over the horizon") {
    const auto constant = TimeDependentHamiltonian::constant(diag2(-0.5, 0.5), 3.0);
    CHECK(sufficient_quantity(decompose(constant, uniform_grid(0.0, 3.0, 31)), 0).total ==
          doctest::Approx(0.0));

    // T = pi/V: S = 2 T max|chi| = 2 * (100 pi) * 0.01 = 2 pi, far from small
    const double horizon = M_PI / 0.01;
    const auto long_traj = decompose(amin(1.0, 0.01, 1.0, horizon),
                                     uniform_grid(0.0, horizon, 31416));
    CHECK(sufficient_quantity(long_traj, 0).total ==
          doctest::Approx(2.0 * M_PI).epsilon(1e-6));

    // T = 1: S = 0.02, small enough to certify
    const auto short_traj =
        decompose(amin(1.0, 0.01, 1.0, 1.0), uniform_grid(0.0, 1.0, 1001));
    CHECK(sufficient_quantity(short_traj, 0).total ==
          doctest::Approx(0.02).epsilon(1e-6));
}

TEST_CASE("population bound is exact for constant H and vacuous at resonance") {
    const auto constant = TimeDependentHamiltonian::constant(diag2(-0.5, 0.5), 3.0);
    const auto bound =
        population_lower_bound(decompose(constant, uniform_grid(0.0, 3.0, 31)), 0);
    CHECK(bound.tight == doctest::Approx(1.0));
    CHECK(bound.coarse == doctest::Approx(1.0));

    const double horizon = M_PI / 0.01;
    const auto resonant = decompose(amin(1.0, 0.01, 1.0, horizon),
                                    uniform_grid(0.0, horizon, 31416));
    const auto vacuous = population_lower_bound(resonant, 0);
    CHECK(vacuous.tight < 0.0);
    CHECK(vacuous.tight >= vacuous.coarse);
}

TEST_CASE("bound chain holds against simulation over random paths") {
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
        const double amp = 1e-3 * std::pow(10.0, seed / 4.0);
        auto run = run_scenario(
            TimeDependentHamiltonian::random_smooth(3, seed, 10.0, amp), 0, 2e-3);
        const auto bound = population_lower_bound(run.trajectory, 0);
        CHECK(run.evolution.final_fidelity >= bound.tight - 1e-6);
        CHECK(bound.tight >= bound.coarse - 1e-6);
    }
}

TEST_CASE("LEET diagnostics recover the paper's scales") {
    // constant gap of 2: T_LEET = 0.5 everywhere, least evolution time pi/2
    Matrix h0 = diag2(-1.0, 1.0);
    const auto constant = TimeDependentHamiltonian::constant(h0, 4.0);
    const auto pairs = leet(decompose(constant, uniform_grid(0.0, 4.0, 41)));
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].mean_t_leet == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pairs[0].least_evolution_time == doctest::Approx(M_PI / 2.0).epsilon(1e-12));

    // amin: T_LEET ~ 1/omega0 = 1, and T = 100 pi holds ~314 of them
    const double horizon = M_PI / 0.01;
    const auto traj = decompose(amin(1.0, 0.01, 1.0, horizon),
                                uniform_grid(0.0, horizon, 31416));
    const auto amin_pairs = leet(traj);
    CHECK(std::abs(amin_pairs[0].mean_t_leet - 1.0) <= 1e-3);
    CHECK(std::abs(amin_pairs[0].count - horizon) <= 0.5);
}

TEST_CASE("epsilon integral vanishes for a constant Hamiltonian eigenstate") {
    const auto h = TimeDependentHamiltonian::constant(diag2(-0.5, 0.5), 3.0);
    auto run = run_scenario(h, 0, 0.01);
    CHECK(std::abs(epsilon_nm(run.evolution, run.trajectory, 0, 1)) <= 1e-12);
}

TEST_CASE("epsilon integral reproduces the final population at resonance") {
    auto run = run_scenario(amin(1.0, 0.01, 1.0, M_PI / 0.01), 0, 2e-3);
    const double eps = epsilon_nm(run.evolution, run.trajectory, 0, 1);
    CHECK(1.0 - 2.0 * eps ==
          doctest::Approx(run.evolution.final_fidelity).epsilon(1e-6));
}

TEST_CASE("epsilon stays bounded off resonance but grows at resonance") {
    double worst_off_resonance = 0.0;
    for (double horizon : {10.0, 50.0, 100.0}) {
        auto run = run_scenario(amin(1.0, 0.01, 0.3, horizon), 0, 5e-3);
        worst_off_resonance = std::max(
            worst_off_resonance,
            std::abs(epsilon_nm(run.evolution, run.trajectory, 0, 1)));
    }
    CHECK(worst_off_resonance <= 0.05);

    auto resonant = run_scenario(amin(1.0, 0.01, 1.0, 100.0), 0, 5e-3);
    CHECK(std::abs(epsilon_nm(resonant.evolution, resonant.trajectory, 0, 1)) > 0.1);
}

TEST_CASE("resonance diagnostics separate the driving regimes") {
    auto resonant = run_scenario(amin(1.0, 0.01, 1.0, 100.0), 0, 0.0);
    const auto on = resonance_diagnostics(resonant.trajectory, 0, 1);
    CHECK(on.verdict == ResonanceVerdict::Resonant);

    auto detuned = run_scenario(amin(1.0, 0.01, 0.3, 100.0), 0, 0.0);
    const auto off = resonance_diagnostics(detuned.trajectory, 0, 1);
    CHECK(off.verdict == ResonanceVerdict::NonResonant);
    CHECK(off.median_omega == doctest::Approx(0.3).epsilon(0.15));

    const auto constant = TimeDependentHamiltonian::constant(diag2(-0.5, 0.5), 20.0);
    const auto flat = decompose(constant, uniform_grid(0.0, 20.0, 401));
    CHECK(resonance_diagnostics(flat, 0, 1).verdict ==
          ResonanceVerdict::Indeterminate);
}

TEST_CASE("analytic amin populations at the paper's sample points") {
    const AminScenario s{1.0, 0.01, 1.0};
    CHECK(amin_analytic_p0(s, 0.0) == doctest::Approx(1.0));
    CHECK(amin_analytic_p0(s, 100.0 * M_PI) == doctest::Approx(0.0));
    CHECK(amin_analytic_p0(s, 50.0 * M_PI) == doctest::Approx(0.5));
}

TEST_CASE("verdicts classify the canonical runs") {
    // constant H: certified
    auto constant = run_scenario(
        TimeDependentHamiltonian::constant(diag2(-0.5, 0.5), 3.0), 0, 0.01);
    const auto certified = evaluate_conditions(constant.trajectory, constant.evolution, 0);
    CHECK(certified.verdict.classification == Classification::CertifiedAdiabatic);

    // resonant amin over T = pi/V: traditional passes, dynamics break down
    auto resonant = run_scenario(amin(1.0, 0.01, 1.0, M_PI / 0.01), 0, 2e-3);
    const auto violation =
        evaluate_conditions(resonant.trajectory, resonant.evolution, 0);
    CHECK(violation.verdict.traditional_pass);
    CHECK_FALSE(violation.verdict.sufficient_pass);
    CHECK_FALSE(violation.verdict.adiabatic_observed);
    CHECK(violation.verdict.classification == Classification::NecessaryOnlyViolation);

    // amin over one LEET: certified by S = 0.02
    auto brief = run_scenario(amin(1.0, 0.01, 1.0, 1.0), 0, 1e-3);
    const auto ok = evaluate_conditions(brief.trajectory, brief.evolution, 0);
    CHECK(ok.verdict.sufficient_pass);
    CHECK(ok.verdict.adiabatic_observed);
    CHECK(ok.verdict.classification == Classification::CertifiedAdiabatic);

    // fast Landau-Zener sweep: traditional fails and the state jumps
    auto jump = run_scenario(
        TimeDependentHamiltonian::landau_zener(2.0, 0.2, 20.0), 0, 2e-3);
    const auto bad = evaluate_conditions(jump.trajectory, jump.evolution, 0);
    CHECK_FALSE(bad.verdict.traditional_pass);
    CHECK_FALSE(bad.verdict.adiabatic_observed);
    CHECK(bad.verdict.classification == Classification::NonAdiabatic);

    // slow-but-steep sweep: traditional fails although the run is adiabatic
    auto steep = run_scenario(
        TimeDependentHamiltonian::landau_zener(0.275, 0.5, 40.0), 0, 2e-3);
    const auto odd = evaluate_conditions(steep.trajectory, steep.evolution, 0);
    CHECK_FALSE(odd.verdict.traditional_pass);
    CHECK(odd.verdict.adiabatic_observed);
    CHECK(odd.verdict.classification == Classification::Other);
}

TEST_CASE("certified runs are observed adiabatic at matched thresholds") {
    ConditionThresholds matched;
    matched.eta_suff = 0.02;
    matched.eta_fid = 0.01;  // eta_suff <= 2 eta_fid
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
        const double amp = 2e-4 * (seed + 1);
        auto run = run_scenario(
            TimeDependentHamiltonian::random_smooth(3, seed, 10.0, amp), 0, 2e-3);
        const auto report =
            evaluate_conditions(run.trajectory, run.evolution, 0, matched);
        if (report.verdict.classification == Classification::CertifiedAdiabatic)
            CHECK(report.verdict.adiabatic_observed);
    }
}

TEST_CASE("horizon doubling keeps max r fixed and doubles S") {
    // periodic drive: extending the horizon cannot change the instantaneous
    // worst ratio, but the cumulative quantity grows with T
    const double horizon = 20.0 * M_PI;
    const auto base = decompose(amin(1.0, 0.01, 1.0, horizon),
                                uniform_grid(0.0, horizon, 2001));
    const auto doubled = decompose(amin(1.0, 0.01, 1.0, 2.0 * horizon),
                                   uniform_grid(0.0, 2.0 * horizon, 4001));
    const double r1 = traditional_ratio(base).max;
    const double r2 = traditional_ratio(doubled).max;
    CHECK(std::abs(r2 - r1) <= 1e-6 * r1);
    const double s1 = sufficient_quantity(base, 0).total;
    const double s2 = sufficient_quantity(doubled, 0).total;
    CHECK(std::abs(s2 - 2.0 * s1) <= 1e-6 * s1);
}

TEST_CASE("literal time dilation halves max r and preserves S") {
    // stretching the same path over twice the time: couplings halve, gaps
    // stay, so r halves pointwise while S = 2 T max|chi| is invariant
    const double horizon = 20.0 * M_PI;
    const auto base = decompose(amin(1.0, 0.01, 1.0, horizon),
                                uniform_grid(0.0, horizon, 2001));
    const auto stretched = decompose(amin(1.0, 0.01, 0.5, 2.0 * horizon),
                                     uniform_grid(0.0, 2.0 * horizon, 4001));
    const double r1 = traditional_ratio(base).max;
    const double r2 = traditional_ratio(stretched).max;
    CHECK(std::abs(r2 - 0.5 * r1) <= 1e-6 * r1);
    const double s1 = sufficient_quantity(base, 0).total;
    const double s2 = sufficient_quantity(stretched, 0).total;
    CHECK(std::abs(s2 - s1) <= 1e-6 * s1);
}

#include "doctest.h"

#include <cmath>

#include "adia/spectral.hpp"

using namespace adia;

namespace {

// Real-symmetric 2x2 path with a known rotation angle: eigenvectors rotate at
// theta_dot, so |chi_01| = |theta_dot| exactly. Serves as the brute-force
// oracle for both coupling routes.
TimeDependentHamiltonian rotating_pair(double theta0, double theta_dot, double e0,
                                       double e1, double horizon) {
    auto rot = [=](double t) {
        const double th = theta0 + theta_dot * t;
        Eigen::Matrix2d r;
        r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Eigen::Matrix2d d = Eigen::Vector2d(e0, e1).asDiagonal();
        return (r * d * r.transpose()).eval();
    };
    auto value = [rot](double t) { return Matrix(rot(t).cast<Complex>()); };
    auto slope = [rot, theta_dot](double t) {
        Eigen::Matrix2d j;
        j << 0, -1, 1, 0;
        const Eigen::Matrix2d h = rot(t);
        return Matrix((theta_dot * (j * h - h * j)).cast<Complex>());
    };
    return TimeDependentHamiltonian(2, horizon, value, slope);
}

TimeDependentHamiltonian amin_default(double horizon) {
    return TimeDependentHamiltonian::amin({1.0, 0.01, 1.0}, horizon);
}

}  // namespace

TEST_CASE("constant Hamiltonian decomposes trivially") {
    Matrix h0(2, 2);
    h0 << Complex(-0.5, 0), Complex(0, 0), Complex(0, 0), Complex(0.5, 0);
    const auto h = TimeDependentHamiltonian::constant(h0, 3.0);
    const auto traj = decompose(h, uniform_grid(0.0, 3.0, 31));

    for (const auto& frame : traj.frames) {
        CHECK(frame.eigenvalues(0) == doctest::Approx(-0.5));
        CHECK(frame.eigenvalues(1) == doctest::Approx(0.5));
        CHECK(std::abs(frame.eigenvectors(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(frame.eigenvectors(1, 1)) == doctest::Approx(1.0));
    }
    for (const auto& chi : traj.couplings) CHECK(chi.norm() == doctest::Approx(0.0));
}

TEST_CASE("amin eigenvalues are +-Omega/2") {
    const auto traj = decompose(amin_default(M_PI), uniform_grid(0.0, M_PI, 201));
    for (Eigen::Index k = 0; k < traj.grid.size(); ++k) {
        const double s = 0.01 * std::sin(traj.grid(k));
        const double omega = std::sqrt(1.0 + 4.0 * s * s);
        CHECK(traj.frames[k].eigenvalues(0) ==
              doctest::Approx(-omega / 2.0).epsilon(1e-12));
        CHECK(traj.frames[k].eigenvalues(1) ==
              doctest::Approx(omega / 2.0).epsilon(1e-12));
    }
    // t = pi/2: Omega = sqrt(1.0004)
    const SpectralFrame& mid = traj.frames[100];
    CHECK(mid.t == doctest::Approx(M_PI / 2.0));
    CHECK(mid.eigenvalues(1) - mid.eigenvalues(0) ==
          doctest::Approx(std::sqrt(1.0004)).epsilon(1e-12));
}

TEST_CASE("amin ground state components follow alpha+-") {
    const auto traj = decompose(amin_default(M_PI), uniform_grid(0.0, M_PI, 101));
    // t = 0: ground state is the first basis vector
    CHECK(std::abs(traj.frames[0].eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(traj.frames[0].eigenvectors(1, 0)) == doctest::Approx(0.0));
    // t = pi/2
    const SpectralFrame& mid = traj.frames[50];
    const double omega = std::sqrt(1.0004);
    const double alpha_p = std::sqrt((omega + 1.0) / (2.0 * omega));
    const double alpha_m = std::sqrt((omega - 1.0) / (2.0 * omega));
    CHECK(std::abs(mid.eigenvectors(0, 0)) == doctest::Approx(alpha_p).epsilon(1e-10));
    CHECK(std::abs(mid.eigenvectors(1, 0)) == doctest::Approx(alpha_m).epsilon(1e-8));
}

TEST_CASE("coupling at t = 0 equals V w0 / eps") {
    const auto h = amin_default(1.0);
    const auto traj = decompose(h, uniform_grid(0.0, 1.0, 11));
    CHECK(std::abs(traj.couplings[0](0, 1)) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("frames are orthonormal and couplings anti-Hermitian with zero diagonal") {
    const auto h = TimeDependentHamiltonian::random_smooth(4, 3, 5.0, 0.2);
    const auto traj = decompose(h, uniform_grid(0.0, 5.0, 501));
    const Matrix eye = Matrix::Identity(4, 4);
    double chi_scale = 0.0;
    for (const auto& chi : traj.couplings)
        chi_scale = std::max(chi_scale, chi.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        const Matrix& v = traj.frames[k].eigenvectors;
        CHECK((v.adjoint() * v - eye).norm() <= 1e-9);
        const Matrix& chi = traj.couplings[k];
        CHECK((chi + chi.adjoint()).cwiseAbs().maxCoeff() <= 1e-8 * (chi_scale + 1.0));
        for (int n = 0; n < 4; ++n) CHECK(std::abs(chi(n, n)) <= 1e-6);
    }
}

TEST_CASE("parallel transport leaves successive overlaps real positive") {
    const auto h = amin_default(6.0);
    const auto traj = decompose(h, uniform_grid(0.0, 6.0, 601));
    for (std::size_t k = 1; k < traj.frames.size(); ++k) {
        for (int n = 0; n < 2; ++n) {
            const Complex ov = traj.frames[k - 1].eigenvectors.col(n).dot(
                traj.frames[k].eigenvectors.col(n));
            CHECK(ov.real() > 0.0);
            CHECK(std::abs(ov.imag()) <= 1e-6);
        }
    }
}

TEST_CASE("gauge alignment is idempotent") {
    const auto h = TimeDependentHamiltonian::random_smooth(3, 9, 4.0, 0.15);
    auto traj = decompose(h, uniform_grid(0.0, 4.0, 101));
    for (std::size_t k = 1; k < traj.frames.size(); ++k) {
        SpectralFrame copy = traj.frames[k];
        align_gauge(copy, traj.frames[k - 1]);
        CHECK((copy.eigenvectors - traj.frames[k].eigenvectors).norm() <= 1e-12);
    }
}

TEST_CASE("both coupling routes match the rotation oracle") {
    const double theta_dot = 0.2;
    const auto h = rotating_pair(0.3, theta_dot, -1.0, 1.0, 2.0);
    const auto traj = decompose(h, uniform_grid(0.0, 2.0, 2001));
    REQUIRE(traj.coupling_method == CouplingMethod::HellmannFeynman);
    const auto fd = coupling_finite_difference(traj);
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        CHECK(std::abs(traj.couplings[k](0, 1)) ==
              doctest::Approx(theta_dot).epsilon(1e-9));
        CHECK(std::abs(fd[k](0, 1)) == doctest::Approx(theta_dot).epsilon(1e-6));
    }
}

TEST_CASE("Hellmann-Feynman and finite-difference couplings cross-validate") {
    const auto h = amin_default(2.0);
    const auto traj = decompose(h, uniform_grid(0.0, 2.0, 2001));
    const auto fd = coupling_finite_difference(traj);
    double chi_scale = 0.0;
    for (const auto& chi : traj.couplings)
        chi_scale = std::max(chi_scale, chi.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < traj.frames.size(); ++k)
        CHECK((traj.couplings[k] - fd[k]).cwiseAbs().maxCoeff() <= 1e-5 * chi_scale);
}

TEST_CASE("sampled linear path reproduces the analytic couplings") {
    // samples of a linear-in-t Hamiltonian interpolate exactly, so the
    // sampled path must carry the same couplings as its analytic source
    Matrix a(2, 2), b(2, 2);
    a << Complex(-0.5, 0), Complex(0, 0), Complex(0, 0), Complex(0.5, 0);
    b << Complex(0, 0), Complex(0.05, 0), Complex(0.05, 0), Complex(0, 0);
    auto analytic = TimeDependentHamiltonian(
        2, 1.0, [=](double t) { return (a + t * b).eval(); },
        [=](double) { return b; });
    std::vector<double> times;
    std::vector<Matrix> samples;
    for (int k = 0; k <= 20; ++k) {
        times.push_back(k / 20.0);
        samples.push_back(a + times.back() * b);
    }
    const auto sampled = TimeDependentHamiltonian::sampled(times, samples);

    const auto grid = uniform_grid(0.0, 1.0, 501);
    const auto traj_exact = decompose(analytic, grid);
    const auto traj_sampled = decompose(sampled, grid);
    for (std::size_t k = 0; k < traj_exact.frames.size(); ++k)
        CHECK(std::abs(traj_sampled.couplings[k](0, 1)) ==
              doctest::Approx(std::abs(traj_exact.couplings[k](0, 1))).epsilon(1e-6));
}

TEST_CASE("degenerate spectra are rejected") {
    Matrix h0 = Matrix::Zero(3, 3);
    h0(0, 0) = Complex(0.3, 0);
    h0(1, 1) = Complex(0.3, 0);  // exact crossing
    h0(2, 2) = Complex(1.0, 0);
    const auto h = TimeDependentHamiltonian::constant(h0, 2.0);
    CHECK_THROWS_AS(decompose(h, uniform_grid(0.0, 2.0, 11)), DegenerateSpectrum);
}

TEST_CASE("coarse grids over a fast crossing lose level tracking") {
    // eigenvalue jump per step (~v h / 2 = 2.5) far exceeds half the minimum
    // gap (~0.01)
    const auto h = TimeDependentHamiltonian::landau_zener(50.0, 0.01, 2.0);
    CHECK_THROWS_AS(decompose(h, uniform_grid(0.0, 2.0, 21)), LevelTrackingLost);
}

TEST_CASE("finite-difference coupling needs three frames") {
    const auto h = amin_default(1.0);
    SpectralTrajectory tiny;
    tiny.grid = uniform_grid(0.0, 1.0, 2);
    tiny.frames.push_back(eigenframe(h(0.0), 0.0));
    tiny.frames.push_back(eigenframe(h(1.0), 1.0));
    CHECK_THROWS_AS(coupling_finite_difference(tiny), InsufficientGrid);
}

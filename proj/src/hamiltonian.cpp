#include "adia/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "adia/rng.hpp"

namespace adia {

double hermiticity_residual(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Amin: return "amin";
        case ScenarioKind::LandauZener: return "landau_zener";
        case ScenarioKind::Constant: return "constant";
        case ScenarioKind::DualDerived: return "dual_derived";
        case ScenarioKind::CustomSampled: return "custom_sampled";
        case ScenarioKind::Custom: return "custom";
    }
    return "unknown";
}

TimeDependentHamiltonian::TimeDependentHamiltonian(int dim, double horizon,
                                                   Evaluator evaluate,
                                                   Evaluator derivative,
                                                   ScenarioKind kind)
    : dim_(dim),
      horizon_(horizon),
      eval_(std::move(evaluate)),
      deriv_(std::move(derivative)),
      kind_(kind) {
    if (dim_ <= 0) throw ConfigError("hamiltonian: dimension must be positive");
    if (!(horizon_ > 0.0)) throw ConfigError("hamiltonian: horizon must be positive");
    if (!eval_) throw ConfigError("hamiltonian: missing evaluator");
}

double TimeDependentHamiltonian::fd_step() const {
    return fd_step_ > 0.0 ? fd_step_ : 1e-6 * horizon_;
}

double TimeDependentHamiltonian::checked_time(double t) const {
    const double slack = 1e-12 * horizon_;
    if (t < -slack || t > horizon_ + slack)
        throw TimeOutOfDomain("time " + std::to_string(t) + " outside [0, " +
                              std::to_string(horizon_) + "]");
    return std::clamp(t, 0.0, horizon_);
}

Matrix TimeDependentHamiltonian::operator()(double t) const {
    const Matrix h = eval_(checked_time(t));
    if (h.rows() != dim_ || h.cols() != dim_)
        throw ConfigError("hamiltonian: evaluator returned wrong dimension");
    const double scale = 1.0 + h.cwiseAbs().maxCoeff();
    if (hermiticity_residual(h) > herm_tol_ * scale)
        throw NonHermitianSample("hamiltonian sample at t = " + std::to_string(t) +
                                 " is not Hermitian within tolerance");
    return h;
}

Matrix TimeDependentHamiltonian::derivative(double t) const {
    const double tc = checked_time(t);
    if (deriv_) {
        Matrix d = deriv_(tc);
        // exact evaluators can carry roundoff-level asymmetry; symmetrize
        return ((d + d.adjoint()) / 2.0).eval();
    }
    const double h = std::min(fd_step(), horizon_ / 4.0);
    if (tc - h >= 0.0 && tc + h <= horizon_)
        return (((*this)(tc + h) - (*this)(tc - h)) / (2.0 * h)).eval();
    if (tc - h < 0.0)  // second-order forward difference
        return ((-3.0 * (*this)(tc) + 4.0 * (*this)(tc + h) - (*this)(tc + 2 * h)) /
                (2.0 * h))
            .eval();
    return ((3.0 * (*this)(tc) - 4.0 * (*this)(tc - h) + (*this)(tc - 2 * h)) /
            (2.0 * h))
        .eval();
}

TimeDependentHamiltonian TimeDependentHamiltonian::amin(const AminScenario& s,
                                                        double horizon) {
    if (!(s.V > 0.0)) throw ConfigError("amin: V must be positive");
    if (!(s.omega0 > 0.0)) throw ConfigError("amin: omega0 must be positive");
    const double eps = s.epsilon, v = s.V, w0 = s.omega0;
    auto value = [eps, v, w0](double t) {
        Matrix h(2, 2);
        const double drive = v * std::sin(w0 * t);
        h << Complex(-eps / 2.0, 0.0), Complex(-drive, 0.0),
            Complex(-drive, 0.0), Complex(eps / 2.0, 0.0);
        return h;
    };
    auto slope = [v, w0](double t) {
        Matrix h(2, 2);
        const double d = -v * w0 * std::cos(w0 * t);
        h << Complex(0.0, 0.0), Complex(d, 0.0), Complex(d, 0.0), Complex(0.0, 0.0);
        return h;
    };
    return TimeDependentHamiltonian(2, horizon, value, slope, ScenarioKind::Amin);
}

TimeDependentHamiltonian TimeDependentHamiltonian::landau_zener(double sweep_rate,
                                                                double gap,
                                                                double horizon) {
    const double v = sweep_rate, delta = gap, half = horizon / 2.0;
    auto value = [v, delta, half](double t) {
        Matrix h(2, 2);
        const double z = v * (t - half) / 2.0;
        h << Complex(z, 0.0), Complex(delta, 0.0), Complex(delta, 0.0), Complex(-z, 0.0);
        return h;
    };
    auto slope = [v](double) {
        Matrix h(2, 2);
        h << Complex(v / 2.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0),
            Complex(-v / 2.0, 0.0);
        return h;
    };
    return TimeDependentHamiltonian(2, horizon, value, slope, ScenarioKind::LandauZener);
}

TimeDependentHamiltonian TimeDependentHamiltonian::constant(const Matrix& h0,
                                                            double horizon) {
    if (h0.rows() != h0.cols() || h0.rows() < 1)
        throw ConfigError("constant: matrix must be square and non-empty");
    const double scale = 1.0 + h0.cwiseAbs().maxCoeff();
    if (hermiticity_residual(h0) > 1e-12 * scale)
        throw NonHermitianSample("constant: matrix is not Hermitian");
    const Matrix fixed = h0;
    const Matrix zero = Matrix::Zero(h0.rows(), h0.cols());
    return TimeDependentHamiltonian(
        static_cast<int>(h0.rows()), horizon, [fixed](double) { return fixed; },
        [zero](double) { return zero; }, ScenarioKind::Constant);
}

TimeDependentHamiltonian TimeDependentHamiltonian::sampled(std::vector<double> times,
                                                           std::vector<Matrix> samples) {
    if (times.size() < 2 || times.size() != samples.size())
        throw ConfigError("sampled: need matching time/matrix sequences, length >= 2");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ConfigError("sampled: times must be strictly increasing");
    if (std::abs(times.front()) > 1e-12 * (std::abs(times.back()) + 1.0))
        throw ConfigError("sampled: time grid must start at 0");
    const Eigen::Index dim = samples.front().rows();
    for (const Matrix& m : samples) {
        if (m.rows() != dim || m.cols() != dim)
            throw ConfigError("sampled: all matrices must share one dimension");
        const double scale = 1.0 + m.cwiseAbs().maxCoeff();
        if (hermiticity_residual(m) > 1e-12 * scale)
            throw NonHermitianSample("sampled: a matrix sample is not Hermitian");
    }

    struct Table {
        std::vector<double> t;
        std::vector<Matrix> m;
        std::size_t segment(double time) const {
            auto it = std::upper_bound(t.begin(), t.end(), time);
            std::size_t i = static_cast<std::size_t>(it - t.begin());
            if (i == 0) return 0;
            if (i >= t.size()) return t.size() - 2;
            return i - 1;
        }
    };
    auto table = std::make_shared<Table>(Table{std::move(times), std::move(samples)});

    auto value = [table](double time) {
        const std::size_t i = table->segment(time);
        const double t0 = table->t[i], t1 = table->t[i + 1];
        const double theta = (time - t0) / (t1 - t0);
        return ((1.0 - theta) * table->m[i] + theta * table->m[i + 1]).eval();
    };
    auto slope = [table](double time) {
        const std::size_t i = table->segment(time);
        return ((table->m[i + 1] - table->m[i]) / (table->t[i + 1] - table->t[i])).eval();
    };
    const double horizon = table->t.back();
    return TimeDependentHamiltonian(static_cast<int>(dim), horizon, value, slope,
                                    ScenarioKind::CustomSampled);
}

TimeDependentHamiltonian TimeDependentHamiltonian::random_smooth(int dim,
                                                                 std::uint32_t seed,
                                                                 double horizon,
                                                                 double amplitude,
                                                                 int modes) {
    if (dim < 2) throw ConfigError("random_smooth: dimension must be >= 2");
    if (modes < 1) throw ConfigError("random_smooth: need at least one mode");
    Rng rng(seed);

    Eigen::VectorXd levels(dim);
    levels(0) = 0.0;
    for (int j = 1; j < dim; ++j) levels(j) = levels(j - 1) + 1.0 + 0.3 * rng.uniform();
    Matrix base = levels.cast<Complex>().asDiagonal();

    struct Mode {
        Matrix a;
        double omega, phase;
    };
    auto spec = std::make_shared<std::vector<Mode>>();
    for (int k = 0; k < modes; ++k) {
        Mode m;
        m.a = amplitude * rng.hermitian(dim);
        m.omega = rng.uniform(0.5, 2.5);
        m.phase = rng.uniform(0.0, 2.0 * M_PI);
        spec->push_back(std::move(m));
    }

    auto value = [base, spec](double t) {
        Matrix h = base;
        for (const auto& m : *spec) h += std::cos(m.omega * t + m.phase) * m.a;
        return h;
    };
    auto slope = [dim, spec](double t) {
        Matrix h = Matrix::Zero(dim, dim);
        for (const auto& m : *spec)
            h += (-m.omega * std::sin(m.omega * t + m.phase)) * m.a;
        return h;
    };
    return TimeDependentHamiltonian(dim, horizon, value, slope, ScenarioKind::Custom);
}

}  // namespace adia

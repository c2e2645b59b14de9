#include "adia/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adia/quadrature.hpp"

namespace adia {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

void check_level(int level, int dim, const char* who) {
    if (level < 0 || level >= dim)
        throw ConfigError(std::string(who) + ": level out of range");
}

}  // namespace

TraditionalReport traditional_ratio(const SpectralTrajectory& traj) {
    const int d = traj.dim();
    const Eigen::Index points = traj.grid.size();
    TraditionalReport report;
    for (int n = 0; n < d; ++n) {
        for (int m = n + 1; m < d; ++m) {
            RatioSeries series;
            series.n = n;
            series.m = m;
            series.values.resize(points);
            for (Eigen::Index k = 0; k < points; ++k) {
                const SpectralFrame& frame = traj.frames[static_cast<std::size_t>(k)];
                const double gap = std::abs(frame.eigenvalues(m) - frame.eigenvalues(n));
                series.values(k) =
                    std::abs(traj.couplings[static_cast<std::size_t>(k)](n, m)) / gap;
            }
            series.max = series.values.maxCoeff(&series.argmax_index);
            series.argmax_time = traj.grid(series.argmax_index);
            if (series.max >= report.max) {
                report.max = series.max;
                report.argmax_time = series.argmax_time;
                report.argmax_n = n;
                report.argmax_m = m;
            }
            report.pairs.push_back(std::move(series));
        }
    }
    return report;
}

SufficientReport sufficient_quantity(const SpectralTrajectory& traj, int level) {
    const int d = traj.dim();
    check_level(level, d, "sufficient_quantity");
    const double horizon = traj.horizon();
    SufficientReport report;
    report.level = level;
    report.terms = Eigen::VectorXd::Zero(d);
    for (int m = 0; m < d; ++m) {
        if (m == level) continue;
        double max_chi = 0.0;
        for (std::size_t k = 0; k < traj.couplings.size(); ++k)
            max_chi = std::max(max_chi, std::abs(traj.couplings[k](level, m)));
        report.terms(m) = 2.0 * horizon * max_chi;
        report.total += report.terms(m);
    }
    return report;
}

PopulationBound population_lower_bound(const SpectralTrajectory& traj, int level) {
    const int d = traj.dim();
    check_level(level, d, "population_lower_bound");
    const double h = uniform_spacing(traj.grid);
    PopulationBound bound;
    double integral_sum = 0.0;
    for (int m = 0; m < d; ++m) {
        if (m == level) continue;
        Eigen::VectorXd abs_chi(traj.grid.size());
        for (Eigen::Index k = 0; k < traj.grid.size(); ++k)
            abs_chi(k) = std::abs(traj.couplings[static_cast<std::size_t>(k)](level, m));
        integral_sum += simpson_series(abs_chi, h);
    }
    bound.tight = 1.0 - 2.0 * integral_sum;
    bound.coarse = 1.0 - sufficient_quantity(traj, level).total;
    return bound;
}

std::vector<LeetPair> leet(const SpectralTrajectory& traj) {
    const int d = traj.dim();
    const double horizon = traj.horizon();
    const double h = uniform_spacing(traj.grid);
    std::vector<LeetPair> pairs;
    for (int n = 0; n < d; ++n) {
        for (int m = n + 1; m < d; ++m) {
            LeetPair p;
            p.n = n;
            p.m = m;
            p.t_leet.resize(traj.grid.size());
            Eigen::VectorXd gap(traj.grid.size());
            for (Eigen::Index k = 0; k < traj.grid.size(); ++k) {
                const SpectralFrame& frame = traj.frames[static_cast<std::size_t>(k)];
                gap(k) = frame.eigenvalues(m) - frame.eigenvalues(n);
                p.t_leet(k) = 1.0 / std::abs(gap(k));
            }
            p.mean_t_leet = simpson_series(p.t_leet, h) / horizon;
            const double mean_gap = simpson_series(gap, h) / horizon;
            p.least_evolution_time = M_PI / std::abs(mean_gap);
            p.count = horizon / p.mean_t_leet;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

double epsilon_nm(const EvolutionResult& result, const SpectralTrajectory& traj,
                  int n, int m) {
    const int d = traj.dim();
    check_level(n, d, "epsilon_nm");
    check_level(m, d, "epsilon_nm");
    if (!result.has_amplitudes())
        throw ConfigError("epsilon_nm: amplitudes not attached to the evolution");
    if (result.grid.size() != traj.grid.size())
        throw GridMismatch("epsilon_nm: evolution and spectral grids differ");

    const double h = uniform_spacing(traj.grid);
    Eigen::VectorXd integrand(traj.grid.size());
    for (Eigen::Index k = 0; k < traj.grid.size(); ++k)
        integrand(k) = (std::conj(result.amplitudes(n, k)) * result.amplitudes(m, k) *
                        traj.couplings[static_cast<std::size_t>(k)](n, m))
                           .real();
    return simpson_series(integrand, h);
}

const char* to_string(ResonanceVerdict v) {
    switch (v) {
        case ResonanceVerdict::Resonant: return "resonant";
        case ResonanceVerdict::NonResonant: return "non_resonant";
        case ResonanceVerdict::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

ResonanceReport resonance_diagnostics(const SpectralTrajectory& traj, int n, int m,
                                      const ConditionThresholds& thresholds) {
    const int d = traj.dim();
    check_level(n, d, "resonance_diagnostics");
    check_level(m, d, "resonance_diagnostics");
    if (n == m) throw ConfigError("resonance_diagnostics: need two distinct levels");

    const Eigen::Index points = traj.grid.size();
    if (points < 5) throw InsufficientGrid("resonance_diagnostics: grid too short");

    ResonanceReport report;
    report.n = n;
    report.m = m;

    // Running-average gap; the t -> 0 limit is the instantaneous gap.
    Eigen::VectorXd gap(points);
    for (Eigen::Index k = 0; k < points; ++k) {
        const SpectralFrame& frame = traj.frames[static_cast<std::size_t>(k)];
        gap(k) = frame.eigenvalues(n) - frame.eigenvalues(m);
    }
    const Eigen::VectorXd accumulated = cumulative_trapezoid(traj.grid, gap);
    report.omega_nm.resize(points);
    report.omega_nm(0) = gap(0);
    for (Eigen::Index k = 1; k < points; ++k)
        report.omega_nm(k) = accumulated(k) / traj.grid(k);

    // Phase of chi_nm where it is defined.
    Eigen::VectorXd chi_abs(points);
    std::vector<bool> defined(static_cast<std::size_t>(points));
    Eigen::Index defined_count = 0;
    for (Eigen::Index k = 0; k < points; ++k) {
        chi_abs(k) = std::abs(traj.couplings[static_cast<std::size_t>(k)](n, m));
        defined[static_cast<std::size_t>(k)] = chi_abs(k) > thresholds.phase_floor;
        if (defined[static_cast<std::size_t>(k)]) ++defined_count;
    }
    report.omega = Eigen::VectorXd::Zero(points);
    if (defined_count <= points / 2) {
        report.verdict = ResonanceVerdict::Indeterminate;
        return report;
    }

    // Unwrap arg chi along the grid. A sign flip of a real coupling advances
    // the phase by exactly pi, so an oscillating real chi accumulates phase at
    // its oscillation frequency.
    Eigen::VectorXd phase = Eigen::VectorXd::Zero(points);
    bool have_prev = false;
    Complex prev(0.0, 0.0);
    double running = 0.0;
    for (Eigen::Index k = 0; k < points; ++k) {
        if (!defined[static_cast<std::size_t>(k)]) {
            phase(k) = running;
            continue;
        }
        const Complex cur = traj.couplings[static_cast<std::size_t>(k)](n, m);
        if (have_prev) {
            double step_arg = std::arg(cur / prev);
            // A sign flip of a real coupling lands at +/-pi with the branch
            // decided by roundoff; count every near-pi jump as +pi so flips
            // accumulate instead of cancelling.
            if (step_arg <= -M_PI + 0.1) step_arg += 2.0 * M_PI;
            running += step_arg;
        }
        phase(k) = running;
        prev = cur;
        have_prev = true;
    }

    // Rate of the unwrapped phase over a window wide enough to average the
    // pi-quantized jumps: ~50 LEETs, clamped to a quarter of the horizon.
    const double mean_gap = gap.cwiseAbs().mean();
    const double h = uniform_spacing(traj.grid);
    double window = 50.0 / std::max(mean_gap, 1e-300);
    window = std::min(window, traj.horizon() / 4.0);
    const Eigen::Index w = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(window / h)));

    // Only full windows enter the statistics; shrunken edge windows would
    // inflate the pi-quantization error.
    std::vector<double> deviations;
    std::vector<double> omegas;
    std::vector<double> omega_nms;
    for (Eigen::Index k = w; k <= points - 1 - w; ++k) {
        if (!defined[static_cast<std::size_t>(k - w)] ||
            !defined[static_cast<std::size_t>(k + w)])
            continue;
        const double rate =
            (phase(k + w) - phase(k - w)) / (traj.grid(k + w) - traj.grid(k - w));
        report.omega(k) = rate;
        omegas.push_back(std::abs(rate));
        omega_nms.push_back(std::abs(report.omega_nm(k)));
        deviations.push_back(std::abs(std::abs(rate) - std::abs(report.omega_nm(k))));
    }
    if (deviations.size() < 3) {
        report.verdict = ResonanceVerdict::Indeterminate;
        return report;
    }
    report.median_omega = median_of(omegas);
    report.median_omega_nm = median_of(omega_nms);
    const double median_dev = median_of(deviations);
    report.verdict = median_dev <= thresholds.resonance_tol * report.median_omega_nm
                         ? ResonanceVerdict::Resonant
                         : ResonanceVerdict::NonResonant;
    return report;
}

double amin_analytic_p0(const AminScenario& scenario, double t) {
    return 0.5 * (std::cos(scenario.V * t) + 1.0);
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::CertifiedAdiabatic: return "certified_adiabatic";
        case Classification::NecessaryOnlyViolation: return "necessary_only_violation";
        case Classification::ConsistentAdiabatic: return "consistent_adiabatic";
        case Classification::NonAdiabatic: return "non_adiabatic";
        case Classification::Other: return "other";
    }
    return "unknown";
}

Verdict make_verdict(double max_ratio, double sufficient_total,
                     double final_population, const ConditionThresholds& thresholds) {
    Verdict v;
    v.thresholds = thresholds;
    v.traditional_pass = max_ratio <= thresholds.eta_trad;
    v.sufficient_pass = sufficient_total <= thresholds.eta_suff;
    v.adiabatic_observed = 1.0 - final_population <= thresholds.eta_fid;
    if (v.sufficient_pass)
        v.classification = Classification::CertifiedAdiabatic;
    else if (v.traditional_pass && !v.adiabatic_observed)
        v.classification = Classification::NecessaryOnlyViolation;
    else if (v.traditional_pass && v.adiabatic_observed)
        v.classification = Classification::ConsistentAdiabatic;
    else if (!v.traditional_pass && !v.adiabatic_observed)
        v.classification = Classification::NonAdiabatic;
    else
        v.classification = Classification::Other;
    return v;
}

ConditionReport evaluate_conditions(const SpectralTrajectory& traj,
                                    const EvolutionResult& result, int tracked_level,
                                    const ConditionThresholds& thresholds) {
    const int d = traj.dim();
    check_level(tracked_level, d, "evaluate_conditions");

    ConditionReport report;
    report.traditional = traditional_ratio(traj);
    report.sufficient = sufficient_quantity(traj, tracked_level);
    report.bound = population_lower_bound(traj, tracked_level);
    report.leet_pairs = leet(traj);
    report.epsilon = Eigen::VectorXd::Zero(d);
    for (int m = 0; m < d; ++m) {
        if (m == tracked_level) continue;
        report.epsilon(m) = epsilon_nm(result, traj, tracked_level, m);
        report.epsilon_total += report.epsilon(m);
    }
    for (int n = 0; n < d; ++n)
        for (int m = n + 1; m < d; ++m)
            report.resonance.push_back(resonance_diagnostics(traj, n, m, thresholds));
    report.verdict = make_verdict(report.traditional.max, report.sufficient.total,
                                  result.final_fidelity, thresholds);
    return report;
}

}  // namespace adia

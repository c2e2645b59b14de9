#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adia/propagate.hpp"
#include "adia/spectral.hpp"

namespace adia {

struct ConditionThresholds {
    double eta_trad = 0.1;        // max r_nm <= eta_trad passes the necessary condition
    double eta_suff = 0.1;        // S <= eta_suff certifies adiabaticity
    double eta_fid = 0.01;        // 1 - P_n(T) <= eta_fid counts as adiabatic
    double resonance_tol = 0.1;
    double phase_floor = 1e-12;   // |chi| below this has no usable phase
    double integrator_slack = 1e-6;
};

// r_nm(t) = |chi_nm(t)| / |E_m(t) - E_n(t)| for one unordered pair.
struct RatioSeries {
    int n = 0, m = 0;
    Eigen::VectorXd values;
    double max = 0.0;
    double argmax_time = 0.0;
    Eigen::Index argmax_index = 0;
};

struct TraditionalReport {
    std::vector<RatioSeries> pairs;
    double max = 0.0;
    double argmax_time = 0.0;
    int argmax_n = 0, argmax_m = 0;
};

TraditionalReport traditional_ratio(const SpectralTrajectory& traj);

// S_nm = 2 T max_t |chi_nm|; total is the sum over m != level.
struct SufficientReport {
    int level = 0;
    Eigen::VectorXd terms;  // indexed by m, zero at m == level
    double total = 0.0;
};

SufficientReport sufficient_quantity(const SpectralTrajectory& traj, int level);

// B = 1 - 2 sum_m int |chi_nm| dt (Simpson on the grid); B_coarse = 1 - S.
// Both may be negative (vacuous but valid).
struct PopulationBound {
    double tight = 1.0;
    double coarse = 1.0;
};

PopulationBound population_lower_bound(const SpectralTrajectory& traj, int level);

// Uncertainty-time diagnostics for one pair. T_LEET(t) = 1/|E_m - E_n| with
// h = 1; least_evolution_time = pi / |mean gap| is the q = 1 phase time.
struct LeetPair {
    int n = 0, m = 0;
    Eigen::VectorXd t_leet;
    double mean_t_leet = 0.0;
    double least_evolution_time = 0.0;
    double count = 0.0;  // M = T / mean(T_LEET)
};

std::vector<LeetPair> leet(const SpectralTrajectory& traj);

// Transition integral eps_nm = int_0^T Re(conj(a_n) a_m chi_nm) dt; satisfies
// P_n(T) = 1 - 2 sum_{m != n} eps_nm when P_n(0) = 1.
double epsilon_nm(const EvolutionResult& result, const SpectralTrajectory& traj,
                  int n, int m);

enum class ResonanceVerdict { Resonant, NonResonant, Indeterminate };

const char* to_string(ResonanceVerdict v);

// Compares the coupling's phase rate omega(t) (windowed slope of the
// unwrapped arg chi_nm, magnitudes) against the accumulated gap rate
// omega_nm(t) = (1/t) int (E_n - E_m).
struct ResonanceReport {
    int n = 0, m = 0;
    Eigen::VectorXd omega;      // phase rate of chi_nm; zero where undefined
    Eigen::VectorXd omega_nm;   // running-average gap
    ResonanceVerdict verdict = ResonanceVerdict::Indeterminate;
    double median_omega = 0.0;
    double median_omega_nm = 0.0;
};

ResonanceReport resonance_diagnostics(const SpectralTrajectory& traj, int n, int m,
                                      const ConditionThresholds& thresholds = {});

// Closed-form ground-state population (cos(V t) + 1)/2, valid for
// epsilon close to omega0.
double amin_analytic_p0(const AminScenario& scenario, double t);

enum class Classification {
    CertifiedAdiabatic,
    NecessaryOnlyViolation,
    ConsistentAdiabatic,
    NonAdiabatic,
    Other,
};

const char* to_string(Classification c);

struct Verdict {
    bool traditional_pass = false;
    bool sufficient_pass = false;
    bool adiabatic_observed = false;
    Classification classification = Classification::Other;
    ConditionThresholds thresholds;
};

Verdict make_verdict(double max_ratio, double sufficient_total,
                     double final_population, const ConditionThresholds& thresholds = {});

// Everything above in one pass, for one tracked level.
struct ConditionReport {
    TraditionalReport traditional;
    SufficientReport sufficient;
    PopulationBound bound;
    std::vector<LeetPair> leet_pairs;
    Eigen::VectorXd epsilon;  // eps_{level,m} indexed by m, zero at m == level
    double epsilon_total = 0.0;
    std::vector<ResonanceReport> resonance;
    Verdict verdict;
};

ConditionReport evaluate_conditions(const SpectralTrajectory& traj,
                                    const EvolutionResult& result, int tracked_level,
                                    const ConditionThresholds& thresholds = {});

}  // namespace adia

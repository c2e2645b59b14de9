#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adia/conditions.hpp"
#include "adia/dual.hpp"

// Command-line front end: config ingestion, the simulate/check/dual/sweep
// pipelines, and CSV/JSON emission. Exit codes: 0 success, 1 config or parse
// error, 2 numerical failure, 3 failed check assertion.
namespace adia::cli {

inline constexpr const char* kToolName = "adiacheck";
inline constexpr const char* kToolVersion = "0.1.0";

struct ScenarioConfig {
    std::string type = "amin";  // amin | landau_zener | constant | custom_csv | dual_of | random
    AminScenario amin;
    double lz_sweep_rate = 0.2;
    double lz_gap = 0.25;
    Matrix constant_matrix;
    std::string csv_path;
    std::shared_ptr<ScenarioConfig> base;  // dual_of
    int random_dim = 3;
    unsigned random_seed = 0;
    double random_amplitude = 0.05;
    int random_modes = 3;
};

struct SweepConfig {
    std::string parameter;  // dotted path into the config, e.g. scenario.omega0
    std::vector<double> values;
};

struct RunConfig {
    ScenarioConfig scenario;
    double horizon = 10.0;
    int initial_level = 0;
    PropagatorOptions propagator;
    ConditionThresholds thresholds;
    std::string csv_dir = "adiacheck_out";
    std::string json_path;  // empty -> <csv_dir>/report.json
    std::optional<SweepConfig> sweep;
    nlohmann::json source;  // merged config document, kept for sweeps
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::ordered_json echo_config(const RunConfig& config);

// Hermitian samples from CSV: column 0 = t, then dim^2 complex entries as
// re/im pairs, row-major.
TimeDependentHamiltonian load_csv_hamiltonian(const std::string& path);

TimeDependentHamiltonian make_hamiltonian(const ScenarioConfig& scenario,
                                          double horizon,
                                          const PropagatorOptions& opts);

struct PipelineResult {
    TimeDependentHamiltonian hamiltonian;
    EvolutionResult evolution;
    SpectralTrajectory trajectory;
    ConditionReport conditions;
};

PipelineResult run_pipeline(const RunConfig& config);

nlohmann::ordered_json build_report(const RunConfig& config, const PipelineResult& r);
void write_series_csv(const std::string& path, const PipelineResult& r);

int cmd_simulate(const RunConfig& config);
int cmd_check(RunConfig config, const std::vector<std::string>& assertions, int seeds);
int cmd_dual(const RunConfig& config, int halvings);
int cmd_sweep(const RunConfig& config);

}  // namespace adia::cli

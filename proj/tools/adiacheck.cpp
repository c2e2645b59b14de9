#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "adia/runner.hpp"

using nlohmann::json;

namespace {

// Flags shared by every subcommand; values land in the config document so
// that flags override config-file fields.
struct CommonFlags {
    std::string config_path;
    std::string scenario;
    double epsilon = 0, V = 0, omega0 = 0;
    double lz_v = 0, lz_delta = 0;
    int dim = 0, modes = 0;
    unsigned seed = 0;
    double amplitude = 0;
    std::string csv_path;
    double horizon = 0;
    int initial_level = 0;
    double dt = 0;
    bool refine = false, no_refine = false;
    double eta_trad = 0, eta_suff = 0, eta_fid = 0, resonance_tol = 0;
    std::string csv_dir, json_path;
    std::string sweep_param;
    std::vector<double> sweep_values;

    CLI::Option* o_scenario = nullptr;
    CLI::Option* o_epsilon = nullptr;
    CLI::Option* o_V = nullptr;
    CLI::Option* o_omega0 = nullptr;
    CLI::Option* o_lz_v = nullptr;
    CLI::Option* o_lz_delta = nullptr;
    CLI::Option* o_dim = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_amplitude = nullptr;
    CLI::Option* o_modes = nullptr;
    CLI::Option* o_csv_path = nullptr;
    CLI::Option* o_horizon = nullptr;
    CLI::Option* o_initial_level = nullptr;
    CLI::Option* o_dt = nullptr;
    CLI::Option* o_refine = nullptr;
    CLI::Option* o_no_refine = nullptr;
    CLI::Option* o_eta_trad = nullptr;
    CLI::Option* o_eta_suff = nullptr;
    CLI::Option* o_eta_fid = nullptr;
    CLI::Option* o_resonance_tol = nullptr;
    CLI::Option* o_csv_dir = nullptr;
    CLI::Option* o_json_path = nullptr;
    CLI::Option* o_sweep_param = nullptr;
    CLI::Option* o_sweep_values = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file");
        o_scenario = app->add_option(
            "--scenario", scenario,
            "Scenario type: amin | landau_zener | constant | custom_csv | random");
        o_epsilon = app->add_option("--epsilon", epsilon, "amin: level splitting");
        o_V = app->add_option("--V", V, "amin: drive amplitude");
        o_omega0 = app->add_option("--omega0", omega0, "amin: drive frequency");
        o_lz_v = app->add_option("--v", lz_v, "landau_zener: sweep rate");
        o_lz_delta = app->add_option("--delta", lz_delta, "landau_zener: gap");
        o_dim = app->add_option("--dim", dim, "random: dimension");
        o_seed = app->add_option("--seed", seed, "random: seed");
        o_amplitude = app->add_option("--amplitude", amplitude, "random: drive amplitude");
        o_modes = app->add_option("--modes", modes, "random: oscillation modes");
        o_csv_path = app->add_option("--csv", csv_path, "custom_csv: sample file");
        o_horizon = app->add_option("--T,--horizon", horizon, "evolution horizon");
        o_initial_level = app->add_option("--initial-level", initial_level,
                                          "tracked instantaneous level");
        o_dt = app->add_option("--dt", dt, "propagator step (0 = auto)");
        o_refine = app->add_flag("--refine", refine, "enable step-halving check");
        o_no_refine = app->add_flag("--no-refine", no_refine, "disable step-halving check");
        o_eta_trad = app->add_option("--eta-trad", eta_trad, "traditional threshold");
        o_eta_suff = app->add_option("--eta-suff", eta_suff, "sufficient threshold");
        o_eta_fid = app->add_option("--eta-fid", eta_fid, "fidelity threshold");
        o_resonance_tol = app->add_option("--resonance-tol", resonance_tol,
                                          "resonance rate tolerance");
        o_csv_dir = app->add_option("--csv-dir", csv_dir, "output directory");
        o_json_path = app->add_option("--json", json_path, "report path");
        o_sweep_param = app->add_option("--param", sweep_param, "sweep parameter path");
        o_sweep_values = app->add_option("--values", sweep_values, "sweep values");
    }

    json merged_config() const {
        json doc = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw adia::ConfigError("cannot open config file '" + config_path + "'");
            try {
                in >> doc;
            } catch (const json::parse_error& e) {
                throw adia::ConfigError(std::string("config parse error: ") + e.what());
            }
        }
        auto passed = [](const CLI::Option* o) { return o && o->count() > 0; };
        if (passed(o_scenario)) doc["scenario"]["type"] = scenario;
        if (passed(o_epsilon)) doc["scenario"]["epsilon"] = epsilon;
        if (passed(o_V)) doc["scenario"]["V"] = V;
        if (passed(o_omega0)) doc["scenario"]["omega0"] = omega0;
        if (passed(o_lz_v)) doc["scenario"]["v"] = lz_v;
        if (passed(o_lz_delta)) doc["scenario"]["delta"] = lz_delta;
        if (passed(o_dim)) doc["scenario"]["dim"] = dim;
        if (passed(o_seed)) doc["scenario"]["seed"] = seed;
        if (passed(o_amplitude)) doc["scenario"]["amplitude"] = amplitude;
        if (passed(o_modes)) doc["scenario"]["modes"] = modes;
        if (passed(o_csv_path)) doc["scenario"]["path"] = csv_path;
        if (passed(o_horizon)) doc["horizon"] = horizon;
        if (passed(o_initial_level)) doc["initial_level"] = initial_level;
        if (passed(o_dt)) doc["propagator"]["dt"] = dt;
        if (passed(o_refine)) doc["propagator"]["refinement"] = true;
        if (passed(o_no_refine)) doc["propagator"]["refinement"] = false;
        if (passed(o_eta_trad)) doc["thresholds"]["eta_trad"] = eta_trad;
        if (passed(o_eta_suff)) doc["thresholds"]["eta_suff"] = eta_suff;
        if (passed(o_eta_fid)) doc["thresholds"]["eta_fid"] = eta_fid;
        if (passed(o_resonance_tol)) doc["thresholds"]["resonance_tol"] = resonance_tol;
        if (passed(o_csv_dir)) doc["outputs"]["csv_dir"] = csv_dir;
        if (passed(o_json_path)) doc["outputs"]["json_path"] = json_path;
        if (passed(o_sweep_param)) doc["sweep"]["parameter"] = sweep_param;
        if (passed(o_sweep_values)) doc["sweep"]["values"] = sweep_values;
        return doc;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adiabatic-condition toolkit: simulate, certify, and diagnose "
                 "time-dependent quantum evolutions"};
    app.set_version_flag("--version", std::string(adia::cli::kToolName) + " " +
                                          adia::cli::kToolVersion);
    app.require_subcommand(1);

    CommonFlags sim_flags, check_flags, dual_flags, sweep_flags;

    CLI::App* simulate = app.add_subcommand(
        "simulate", "run one scenario, write a JSON report and CSV series");
    sim_flags.attach(simulate);

    CLI::App* check =
        app.add_subcommand("check", "run with refinement and verify assertions");
    check_flags.attach(check);
    std::vector<std::string> assertions;
    check->add_option("--assert", assertions,
                      "oracle[:tol] | bound[:slack] | identity[:tol] | dual[:limit]");
    int seeds = 0;
    check->add_option("--seeds", seeds, "repeat over random seeds 0..N-1");

    CLI::App* dual = app.add_subcommand(
        "dual", "build the companion system and verify its identities");
    dual_flags.attach(dual);
    int halvings = 0;
    dual->add_flag("--halve-dt", halvings,
                   "repeat dual verification with dt halved (repeatable)");

    CLI::App* sweep =
        app.add_subcommand("sweep", "run a parameter sweep and aggregate results");
    sweep_flags.attach(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return adia::cli::cmd_simulate(adia::cli::parse_config(sim_flags.merged_config()));
        if (check->parsed())
            return adia::cli::cmd_check(adia::cli::parse_config(check_flags.merged_config()),
                                        assertions, seeds);
        if (dual->parsed())
            return adia::cli::cmd_dual(adia::cli::parse_config(dual_flags.merged_config()),
                                       halvings);
        if (sweep->parsed())
            return adia::cli::cmd_sweep(adia::cli::parse_config(sweep_flags.merged_config()));
    } catch (const adia::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const adia::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const adia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

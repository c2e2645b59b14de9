#include "adia/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

namespace adia::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double require_number(const json& j, const std::string& key, double fallback,
                      bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (!j.at(key).is_number())
        throw ConfigError("config: field '" + key + "' must be a number");
    if (present) *present = true;
    return j.at(key).get<double>();
}

Matrix parse_matrix(const json& j) {
    if (!j.is_array() || j.empty())
        throw ConfigError("config: 'matrix' must be a non-empty array of rows");
    const Eigen::Index d = static_cast<Eigen::Index>(j.size());
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const json& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
            throw ConfigError("config: 'matrix' must be square");
        for (Eigen::Index c = 0; c < d; ++c) {
            const json& cell = row.at(static_cast<std::size_t>(c));
            if (cell.is_number()) {
                m(r, c) = Complex(cell.get<double>(), 0.0);
            } else if (cell.is_array() && cell.size() == 2) {
                m(r, c) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
            } else {
                throw ConfigError("config: matrix entries are numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

ScenarioConfig parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("config: 'scenario' must be an object");
    ScenarioConfig s;
    s.type = j.value("type", std::string("amin"));
    if (s.type == "amin") {
        s.amin.epsilon = require_number(j, "epsilon", s.amin.epsilon);
        s.amin.V = require_number(j, "V", s.amin.V);
        s.amin.omega0 = require_number(j, "omega0", s.amin.omega0);
    } else if (s.type == "landau_zener") {
        s.lz_sweep_rate = require_number(j, "v", s.lz_sweep_rate);
        s.lz_gap = require_number(j, "delta", s.lz_gap);
    } else if (s.type == "constant") {
        if (!j.contains("matrix"))
            throw ConfigError("config: constant scenario needs a 'matrix'");
        s.constant_matrix = parse_matrix(j.at("matrix"));
    } else if (s.type == "custom_csv") {
        if (!j.contains("path"))
            throw ConfigError("config: custom_csv scenario needs a 'path'");
        s.csv_path = j.at("path").get<std::string>();
    } else if (s.type == "dual_of") {
        if (!j.contains("base"))
            throw ConfigError("config: dual_of scenario needs a 'base' scenario");
        s.base = std::make_shared<ScenarioConfig>(parse_scenario(j.at("base")));
    } else if (s.type == "random") {
        s.random_dim = static_cast<int>(require_number(j, "dim", s.random_dim));
        s.random_seed = static_cast<unsigned>(require_number(j, "seed", s.random_seed));
        s.random_amplitude = require_number(j, "amplitude", s.random_amplitude);
        s.random_modes = static_cast<int>(require_number(j, "modes", s.random_modes));
    } else {
        throw ConfigError("config: unknown scenario type '" + s.type + "'");
    }
    return s;
}

json scenario_to_json(const ScenarioConfig& s) {
    json j;
    j["type"] = s.type;
    if (s.type == "amin") {
        j["epsilon"] = s.amin.epsilon;
        j["V"] = s.amin.V;
        j["omega0"] = s.amin.omega0;
    } else if (s.type == "landau_zener") {
        j["v"] = s.lz_sweep_rate;
        j["delta"] = s.lz_gap;
    } else if (s.type == "constant") {
        j["matrix"] = matrix_to_json(s.constant_matrix);
    } else if (s.type == "custom_csv") {
        j["path"] = s.csv_path;
    } else if (s.type == "dual_of") {
        j["base"] = s.base ? scenario_to_json(*s.base) : json();
    } else if (s.type == "random") {
        j["dim"] = s.random_dim;
        j["seed"] = s.random_seed;
        j["amplitude"] = s.random_amplitude;
        j["modes"] = s.random_modes;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
    RunConfig c;
    c.source = j;
    if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario"));
    c.horizon = require_number(j, "horizon", c.horizon);
    if (!(c.horizon > 0.0)) throw ConfigError("config: horizon must be positive");
    c.initial_level = static_cast<int>(require_number(j, "initial_level", 0));
    if (c.initial_level < 0) throw ConfigError("config: initial_level must be >= 0");

    if (j.contains("propagator")) {
        const json& p = j.at("propagator");
        c.propagator.dt = require_number(p, "dt", c.propagator.dt);
        if (c.propagator.dt < 0.0) throw ConfigError("config: dt must be >= 0");
        if (p.contains("refinement")) c.propagator.refinement = p.at("refinement").get<bool>();
        c.propagator.unitarity_tol =
            require_number(p, "unitarity_tol", c.propagator.unitarity_tol);
    }
    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        c.thresholds.eta_trad = require_number(t, "eta_trad", c.thresholds.eta_trad);
        c.thresholds.eta_suff = require_number(t, "eta_suff", c.thresholds.eta_suff);
        c.thresholds.eta_fid = require_number(t, "eta_fid", c.thresholds.eta_fid);
        c.thresholds.resonance_tol =
            require_number(t, "resonance_tol", c.thresholds.resonance_tol);
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        if (o.contains("csv_dir")) c.csv_dir = o.at("csv_dir").get<std::string>();
        if (o.contains("json_path")) c.json_path = o.at("json_path").get<std::string>();
    }
    if (c.json_path.empty()) c.json_path = c.csv_dir + "/report.json";

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        SweepConfig sweep;
        if (!s.contains("parameter") || !s.at("parameter").is_string())
            throw ConfigError("config: sweep needs a 'parameter' path");
        sweep.parameter = s.at("parameter").get<std::string>();
        if (!s.contains("values") || !s.at("values").is_array() || s.at("values").empty())
            throw ConfigError("config: sweep needs a non-empty 'values' list");
        for (const json& v : s.at("values")) {
            if (!v.is_number()) throw ConfigError("config: sweep values must be numbers");
            sweep.values.push_back(v.get<double>());
        }
        c.sweep = std::move(sweep);
    }
    return c;
}

ordered_json echo_config(const RunConfig& c) {
    ordered_json j;
    j["scenario"] = scenario_to_json(c.scenario);
    j["horizon"] = c.horizon;
    j["initial_level"] = c.initial_level;
    j["propagator"] = {{"dt", c.propagator.dt},
                       {"refinement", c.propagator.refinement},
                       {"unitarity_tol", c.propagator.unitarity_tol}};
    j["thresholds"] = {{"eta_trad", c.thresholds.eta_trad},
                       {"eta_suff", c.thresholds.eta_suff},
                       {"eta_fid", c.thresholds.eta_fid},
                       {"resonance_tol", c.thresholds.resonance_tol}};
    j["outputs"] = {{"csv_dir", c.csv_dir}, {"json_path", c.json_path}};
    if (c.sweep)
        j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
    return j;
}

TimeDependentHamiltonian load_csv_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("custom_csv: cannot open '" + path + "'");
    std::vector<double> times;
    std::vector<Matrix> samples;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            first = false;
            try {
                (void)std::stod(cells.at(0));
            } catch (...) {
                continue;  // header row
            }
        }
        std::vector<double> row;
        for (const std::string& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (...) {
                throw ConfigError("custom_csv: non-numeric cell '" + c + "'");
            }
        }
        if (row.size() < 3) throw ConfigError("custom_csv: too few columns");
        const double entries = static_cast<double>(row.size() - 1) / 2.0;
        const int d = static_cast<int>(std::lround(std::sqrt(entries)));
        if (static_cast<std::size_t>(2 * d * d) + 1 != row.size())
            throw ConfigError("custom_csv: column count must be 1 + 2*dim^2");
        Matrix m(d, d);
        std::size_t idx = 1;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                m(r, c) = Complex(row[idx], row[idx + 1]);
                idx += 2;
            }
        times.push_back(row[0]);
        samples.push_back(std::move(m));
    }
    if (times.size() < 2) throw ConfigError("custom_csv: need at least two samples");
    return TimeDependentHamiltonian::sampled(std::move(times), std::move(samples));
}

namespace {

// Same path, shorter horizon.
TimeDependentHamiltonian restrict_horizon(const TimeDependentHamiltonian& h,
                                          double horizon) {
    if (horizon > h.horizon() * (1.0 + 1e-12))
        throw ConfigError("scenario does not cover the requested horizon");
    TimeDependentHamiltonian::Evaluator deriv = nullptr;
    if (h.has_analytic_derivative())
        deriv = [h](double t) { return h.derivative(t); };
    return TimeDependentHamiltonian(
        h.dim(), horizon, [h](double t) { return h(t); }, deriv, h.kind());
}

}  // namespace

TimeDependentHamiltonian make_hamiltonian(const ScenarioConfig& s, double horizon,
                                          const PropagatorOptions& opts) {
    if (s.type == "amin") return TimeDependentHamiltonian::amin(s.amin, horizon);
    if (s.type == "landau_zener")
        return TimeDependentHamiltonian::landau_zener(s.lz_sweep_rate, s.lz_gap, horizon);
    if (s.type == "constant")
        return TimeDependentHamiltonian::constant(s.constant_matrix, horizon);
    if (s.type == "custom_csv") {
        TimeDependentHamiltonian h = load_csv_hamiltonian(s.csv_path);
        return restrict_horizon(h, horizon);
    }
    if (s.type == "dual_of") {
        if (!s.base) throw ConfigError("dual_of: missing base scenario");
        const TimeDependentHamiltonian base = make_hamiltonian(*s.base, horizon, opts);
        return build_dual(base, opts).h_b();
    }
    if (s.type == "random")
        return TimeDependentHamiltonian::random_smooth(s.random_dim, s.random_seed,
                                                       horizon, s.random_amplitude,
                                                       s.random_modes);
    throw ConfigError("unknown scenario type '" + s.type + "'");
}

PipelineResult run_pipeline(const RunConfig& config) {
    PipelineResult r;
    r.hamiltonian =
        make_hamiltonian(config.scenario, config.horizon, config.propagator);
    if (config.initial_level >= r.hamiltonian.dim())
        throw ConfigError("initial_level exceeds the system dimension");

    SpectralFrame frame0 = eigenframe(r.hamiltonian(0.0), 0.0);
    canonicalize_gauge(frame0);
    const Vector psi0 = frame0.eigenvectors.col(config.initial_level);

    r.evolution = evolve(r.hamiltonian, psi0, config.propagator);
    r.trajectory = decompose(r.hamiltonian, r.evolution.grid);
    attach_frames(r.evolution, r.trajectory, config.initial_level);
    r.conditions = evaluate_conditions(r.trajectory, r.evolution, config.initial_level,
                                       config.thresholds);
    return r;
}

namespace {

constexpr Eigen::Index kMaxSeriesPoints = 10000;

// Stride-downsampled indices, always retaining the endpoints and every
// arg-max sample of a reported maximum.
std::vector<Eigen::Index> downsample_indices(const PipelineResult& r) {
    const Eigen::Index total = r.evolution.grid.size();
    std::set<Eigen::Index> keep;
    const Eigen::Index stride = std::max<Eigen::Index>(1, (total + kMaxSeriesPoints - 1) / kMaxSeriesPoints);
    for (Eigen::Index k = 0; k < total; k += stride) keep.insert(k);
    keep.insert(total - 1);
    for (const RatioSeries& pair : r.conditions.traditional.pairs)
        keep.insert(pair.argmax_index);
    // arg-max of |chi| per pair feeds the sufficient quantity
    const int d = r.trajectory.dim();
    for (int n = 0; n < d; ++n)
        for (int m = n + 1; m < d; ++m) {
            Eigen::Index best = 0;
            double best_val = -1.0;
            for (std::size_t k = 0; k < r.trajectory.couplings.size(); ++k) {
                const double v = std::abs(r.trajectory.couplings[k](n, m));
                if (v > best_val) {
                    best_val = v;
                    best = static_cast<Eigen::Index>(k);
                }
            }
            keep.insert(best);
        }
    return {keep.begin(), keep.end()};
}

const ResonanceReport* find_resonance(const ConditionReport& c, int n, int m) {
    for (const ResonanceReport& r : c.resonance)
        if (r.n == n && r.m == m) return &r;
    return nullptr;
}

}  // namespace

ordered_json build_report(const RunConfig& config, const PipelineResult& r) {
    const ConditionReport& c = r.conditions;
    const int d = r.trajectory.dim();
    const Eigen::Index last = r.evolution.grid.size() - 1;

    ordered_json report;
    report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    report["config"] = echo_config(config);
    report["grid"] = {
        {"dt", r.evolution.dt()},
        {"points", r.evolution.grid.size()},
        {"refinement", config.propagator.refinement},
        {"analytic_derivative", r.hamiltonian.has_analytic_derivative()},
        {"coupling_method",
         r.trajectory.coupling_method == CouplingMethod::HellmannFeynman
             ? "hellmann_feynman"
             : "finite_difference"},
        {"fd_step", r.hamiltonian.has_analytic_derivative() ? 0.0
                                                            : r.hamiltonian.fd_step()}};

    ordered_json evolution;
    evolution["tracked_level"] = r.evolution.tracked_level;
    evolution["final_fidelity"] = r.evolution.final_fidelity;
    std::vector<double> final_pops(static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n)
        final_pops[static_cast<std::size_t>(n)] = r.evolution.populations(n, last);
    evolution["final_populations"] = final_pops;
    report["evolution"] = evolution;

    ordered_json conditions;
    {
        ordered_json trad;
        trad["max"] = c.traditional.max;
        trad["argmax_time"] = c.traditional.argmax_time;
        trad["argmax_pair"] = {c.traditional.argmax_n, c.traditional.argmax_m};
        ordered_json pairs = ordered_json::array();
        for (const RatioSeries& p : c.traditional.pairs)
            pairs.push_back({{"n", p.n},
                             {"m", p.m},
                             {"max", p.max},
                             {"argmax_time", p.argmax_time}});
        trad["pairs"] = pairs;
        conditions["traditional"] = trad;
    }
    {
        ordered_json suff;
        suff["level"] = c.sufficient.level;
        suff["total"] = c.sufficient.total;
        ordered_json terms = ordered_json::array();
        for (int m = 0; m < d; ++m) {
            if (m == c.sufficient.level) continue;
            terms.push_back({{"m", m}, {"value", c.sufficient.terms(m)}});
        }
        suff["terms"] = terms;
        conditions["sufficient"] = suff;
    }
    conditions["population_bound"] = {{"tight", c.bound.tight},
                                      {"coarse", c.bound.coarse}};
    {
        ordered_json leets = ordered_json::array();
        for (const LeetPair& p : c.leet_pairs)
            leets.push_back({{"n", p.n},
                             {"m", p.m},
                             {"mean_t_leet", p.mean_t_leet},
                             {"least_evolution_time", p.least_evolution_time},
                             {"count", p.count}});
        conditions["leet"] = leets;
    }
    {
        ordered_json eps = ordered_json::array();
        for (int m = 0; m < d; ++m) {
            if (m == r.evolution.tracked_level) continue;
            eps.push_back({{"m", m}, {"value", c.epsilon(m)}});
        }
        conditions["epsilon"] = {{"level", r.evolution.tracked_level},
                                 {"terms", eps},
                                 {"total", c.epsilon_total}};
    }
    {
        ordered_json res = ordered_json::array();
        for (const ResonanceReport& p : c.resonance)
            res.push_back({{"n", p.n},
                           {"m", p.m},
                           {"verdict", to_string(p.verdict)},
                           {"median_phase_rate", p.median_omega},
                           {"median_gap_rate", p.median_omega_nm}});
        conditions["resonance"] = res;
    }
    report["conditions"] = conditions;

    const std::vector<Eigen::Index> idx = downsample_indices(r);
    ordered_json series;
    {
        std::vector<double> t;
        t.reserve(idx.size());
        for (Eigen::Index k : idx) t.push_back(r.evolution.grid(k));
        series["t"] = t;
        ordered_json eig = ordered_json::array();
        ordered_json pop = ordered_json::array();
        for (int n = 0; n < d; ++n) {
            std::vector<double> e, p;
            e.reserve(idx.size());
            p.reserve(idx.size());
            for (Eigen::Index k : idx) {
                e.push_back(
                    r.trajectory.frames[static_cast<std::size_t>(k)].eigenvalues(n));
                p.push_back(r.evolution.populations(n, k));
            }
            eig.push_back(e);
            pop.push_back(p);
        }
        series["eigenvalues"] = eig;
        series["populations"] = pop;
        ordered_json pairs = ordered_json::array();
        for (const RatioSeries& p : c.traditional.pairs) {
            std::vector<double> chi, ratio;
            chi.reserve(idx.size());
            ratio.reserve(idx.size());
            for (Eigen::Index k : idx) {
                chi.push_back(
                    std::abs(r.trajectory.couplings[static_cast<std::size_t>(k)](p.n, p.m)));
                ratio.push_back(p.values(k));
            }
            ordered_json entry = {{"n", p.n}, {"m", p.m}, {"chi_abs", chi}, {"ratio", ratio}};
            if (const ResonanceReport* rr = find_resonance(c, p.n, p.m)) {
                std::vector<double> om, omnm;
                om.reserve(idx.size());
                omnm.reserve(idx.size());
                for (Eigen::Index k : idx) {
                    om.push_back(rr->omega(k));
                    omnm.push_back(rr->omega_nm(k));
                }
                entry["omega"] = om;
                entry["omega_nm"] = omnm;
            }
            pairs.push_back(std::move(entry));
        }
        series["pairs"] = pairs;
    }
    report["series"] = series;

    report["verdict"] = {{"traditional_pass", c.verdict.traditional_pass},
                         {"sufficient_pass", c.verdict.sufficient_pass},
                         {"adiabatic_observed", c.verdict.adiabatic_observed},
                         {"classification", to_string(c.verdict.classification)},
                         {"thresholds",
                          {{"eta_trad", c.verdict.thresholds.eta_trad},
                           {"eta_suff", c.verdict.thresholds.eta_suff},
                           {"eta_fid", c.verdict.thresholds.eta_fid},
                           {"resonance_tol", c.verdict.thresholds.resonance_tol}}}};
    return report;
}

void write_series_csv(const std::string& path, const PipelineResult& r) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open CSV output '" + path + "'");
    const int d = r.trajectory.dim();
    const ConditionReport& c = r.conditions;

    out << "t";
    for (int n = 0; n < d; ++n) out << ",E_" << n;
    for (int n = 0; n < d; ++n) out << ",P_" << n;
    for (const RatioSeries& p : c.traditional.pairs)
        out << ",chi_abs_" << p.n << "_" << p.m;
    for (const RatioSeries& p : c.traditional.pairs)
        out << ",r_" << p.n << "_" << p.m;
    out << "\n";

    for (Eigen::Index k : downsample_indices(r)) {
        out << fmt17(r.evolution.grid(k));
        const SpectralFrame& frame = r.trajectory.frames[static_cast<std::size_t>(k)];
        for (int n = 0; n < d; ++n) out << "," << fmt17(frame.eigenvalues(n));
        for (int n = 0; n < d; ++n) out << "," << fmt17(r.evolution.populations(n, k));
        for (const RatioSeries& p : c.traditional.pairs)
            out << ","
                << fmt17(std::abs(
                       r.trajectory.couplings[static_cast<std::size_t>(k)](p.n, p.m)));
        for (const RatioSeries& p : c.traditional.pairs)
            out << "," << fmt17(p.values(k));
        out << "\n";
    }
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot open output '" + path + "'");
    out << content;
}

void write_report_files(const RunConfig& config, const PipelineResult& r,
                        const ordered_json& report) {
    fs::create_directories(config.csv_dir);
    write_text_file(config.json_path, report.dump(2) + "\n");
    write_series_csv(config.csv_dir + "/series.csv", r);
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
    const PipelineResult r = run_pipeline(config);
    const ordered_json report = build_report(config, r);
    write_report_files(config, r, report);
    std::cout << "wrote " << config.json_path << " and " << config.csv_dir
              << "/series.csv\n"
              << "final fidelity " << r.evolution.final_fidelity << ", verdict "
              << to_string(r.conditions.verdict.classification) << "\n";
    return 0;
}

namespace {

struct Assertion {
    std::string name;
    double value = 0.0;
    bool has_value = false;
};

Assertion parse_assertion(const std::string& text) {
    Assertion a;
    const auto colon = text.find(':');
    a.name = text.substr(0, colon);
    if (colon != std::string::npos) {
        try {
            a.value = std::stod(text.substr(colon + 1));
        } catch (...) {
            throw ConfigError("check: bad assertion argument in '" + text + "'");
        }
        a.has_value = true;
    }
    return a;
}

struct CheckFailure {
    std::string message;
};

void run_assertion(const Assertion& a, const RunConfig& config,
                   const PipelineResult& r) {
    const int level = r.evolution.tracked_level;
    if (a.name == "oracle") {
        if (config.scenario.type != "amin")
            throw ConfigError("check: 'oracle' assertion requires the amin scenario");
        const double tol = a.has_value ? a.value : 0.05;
        double sup = 0.0;
        for (Eigen::Index k = 0; k < r.evolution.grid.size(); ++k)
            sup = std::max(sup, std::abs(r.evolution.populations(0, k) -
                                         amin_analytic_p0(config.scenario.amin,
                                                          r.evolution.grid(k))));
        if (sup > tol)
            throw CheckFailure{"oracle: sup-norm deviation " + fmt17(sup) +
                               " exceeds " + fmt17(tol)};
        return;
    }
    if (a.name == "bound") {
        const double slack = a.has_value ? a.value : r.conditions.verdict.thresholds.integrator_slack;
        const PopulationBound& b = r.conditions.bound;
        if (r.evolution.final_fidelity < b.tight - slack)
            throw CheckFailure{"bound: P(T) = " + fmt17(r.evolution.final_fidelity) +
                               " below B = " + fmt17(b.tight)};
        if (b.tight < b.coarse - slack)
            throw CheckFailure{"bound: B = " + fmt17(b.tight) + " below B_coarse = " +
                               fmt17(b.coarse)};
        // quadrature stability: halving the step must not move B appreciably
        RunConfig finer = config;
        finer.propagator.dt = r.evolution.dt() / 2.0;
        finer.propagator.refinement = false;
        const TimeDependentHamiltonian h = make_hamiltonian(
            finer.scenario, finer.horizon, finer.propagator);
        const SpectralTrajectory traj =
            decompose(h, uniform_grid(0.0, finer.horizon,
                                      2 * (r.evolution.grid.size() - 1) + 1));
        const double b_fine = population_lower_bound(traj, level).tight;
        if (std::abs(b_fine - b.tight) >= 1e-6)
            throw CheckFailure{"bound: grid refinement moved B by " +
                               fmt17(std::abs(b_fine - b.tight))};
        return;
    }
    if (a.name == "identity") {
        const double tol = a.has_value ? a.value : 1e-6;
        const double predicted = 1.0 - 2.0 * r.conditions.epsilon_total;
        const double gap = std::abs(predicted - r.evolution.final_fidelity);
        if (gap > tol)
            throw CheckFailure{"identity: |P(T) - (1 - 2 sum eps)| = " + fmt17(gap) +
                               " exceeds " + fmt17(tol)};
        return;
    }
    if (a.name == "dual") {
        const double limit = a.has_value ? a.value : 1e-5;
        PropagatorOptions opts = config.propagator;
        opts.refinement = false;
        const DualSystem dual =
            build_dual(make_hamiltonian(config.scenario, config.horizon, opts), opts);
        const Eigen::VectorXd vgrid = uniform_grid(0.0, config.horizon, 101);
        const DualSpectrumResiduals spec = verify_spectrum_and_states(dual, vgrid);
        const double inverse = verify_evolution_inverse(dual, opts);
        const Eigen::VectorXd cgrid =
            uniform_grid(config.horizon * 0.01, config.horizon * 0.99, 51);
        const double coupling = coupling_relation_check(dual, cgrid);
        double herm = 0.0;
        for (Eigen::Index k = 0; k < vgrid.size(); ++k)
            herm = std::max(herm, hermiticity_residual(dual.h_b()(vgrid(k))));
        if (spec.spectrum_negation > limit)
            throw CheckFailure{"dual: spectrum negation residual " +
                               fmt17(spec.spectrum_negation)};
        if (spec.eigenstate_map > limit)
            throw CheckFailure{"dual: eigenstate map residual " +
                               fmt17(spec.eigenstate_map)};
        if (inverse > limit)
            throw CheckFailure{"dual: U_B U_A - I residual " + fmt17(inverse)};
        if (coupling > limit)
            throw CheckFailure{"dual: coupling relation residual " + fmt17(coupling)};
        if (herm > 1e-10)
            throw CheckFailure{"dual: hermiticity residual " + fmt17(herm)};
        return;
    }
    throw ConfigError("check: unknown assertion '" + a.name + "'");
}

}  // namespace

int cmd_check(RunConfig config, const std::vector<std::string>& assertions, int seeds) {
    if (assertions.empty())
        throw ConfigError("check: at least one --assert is required");
    std::vector<Assertion> parsed;
    for (const std::string& text : assertions) parsed.push_back(parse_assertion(text));
    config.propagator.refinement = true;

    const int runs = std::max(1, seeds);
    if (seeds > 0 && config.scenario.type != "random")
        throw ConfigError("check: --seeds requires the random scenario");

    for (int run = 0; run < runs; ++run) {
        if (seeds > 0) config.scenario.random_seed = static_cast<unsigned>(run);
        const PipelineResult r = run_pipeline(config);
        for (const Assertion& a : parsed) {
            try {
                run_assertion(a, config, r);
                std::cout << "check " << a.name;
                if (seeds > 0) std::cout << " [seed " << run << "]";
                std::cout << ": ok\n";
            } catch (const CheckFailure& f) {
                std::cout << "check " << a.name;
                if (seeds > 0) std::cout << " [seed " << run << "]";
                std::cout << ": FAIL  " << f.message << "\n";
                return 3;
            }
        }
    }
    return 0;
}

int cmd_dual(const RunConfig& config, int halvings) {
    const PipelineResult r = run_pipeline(config);
    ordered_json report = build_report(config, r);

    PropagatorOptions opts = config.propagator;
    opts.refinement = false;
    if (opts.dt <= 0.0) opts.dt = r.evolution.dt();

    ordered_json runs = ordered_json::array();
    for (int lvl = 0; lvl <= halvings; ++lvl) {
        const TimeDependentHamiltonian h_a =
            make_hamiltonian(config.scenario, config.horizon, opts);
        const DualSystem dual = build_dual(h_a, opts);
        const Eigen::VectorXd vgrid = uniform_grid(0.0, config.horizon, 101);
        const DualSpectrumResiduals spec = verify_spectrum_and_states(dual, vgrid);
        const double inverse = verify_evolution_inverse(dual, opts);
        const Eigen::VectorXd cgrid =
            uniform_grid(config.horizon * 0.01, config.horizon * 0.99, 51);
        const double coupling = coupling_relation_check(dual, cgrid);
        double herm = 0.0;
        for (Eigen::Index k = 0; k < vgrid.size(); ++k)
            herm = std::max(herm, hermiticity_residual(dual.h_b()(vgrid(k))));
        runs.push_back({{"dt", opts.dt},
                        {"hermiticity", herm},
                        {"spectrum_negation", spec.spectrum_negation},
                        {"eigenstate_map", spec.eigenstate_map},
                        {"evolution_inverse", inverse},
                        {"coupling_relation", coupling}});
        opts.dt /= 2.0;
    }

    ordered_json phases = ordered_json::array();
    const TimeDependentHamiltonian h_a =
        make_hamiltonian(config.scenario, config.horizon, config.propagator);
    for (int n = 0; n < h_a.dim(); ++n)
        for (int k2 = n + 1; k2 < h_a.dim(); ++k2) {
            const PiPhaseResidual p = pi_phase_residual(h_a, k2, n, config.horizon);
            phases.push_back({{"n", k2},
                              {"k", n},
                              {"value", p.value},
                              {"nearest_q", p.nearest_q},
                              {"residual", p.residual}});
        }

    report["dual"] = {{"runs", runs}, {"pi_phase", phases}};
    write_report_files(config, r, report);
    std::cout << "wrote " << config.json_path << " with dual residuals\n";
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    if (!config.sweep) throw ConfigError("sweep: config has no sweep block");
    const SweepConfig& sweep = *config.sweep;

    // dotted path -> JSON pointer
    std::string pointer = "/" + sweep.parameter;
    for (char& c : pointer)
        if (c == '.') c = '/';

    std::vector<RunConfig> items;
    for (double value : sweep.values) {
        json doc = config.source;
        doc.erase("sweep");
        try {
            doc[json::json_pointer(pointer)] = value;
        } catch (const json::exception&) {
            throw ConfigError("sweep: cannot set parameter '" + sweep.parameter + "'");
        }
        RunConfig item = parse_config(doc);
        if (item.sweep) throw ConfigError("sweep: nested sweep not allowed");
        items.push_back(std::move(item));
    }
    // the substituted parameter must actually land somewhere numeric
    {
        json probe = config.source;
        const json::json_pointer ptr(pointer);
        if (!probe.contains(ptr) || !probe.at(ptr).is_number())
            throw ConfigError("sweep: parameter '" + sweep.parameter +
                              "' does not name a numeric config field");
    }

    const std::size_t count = items.size();
    std::vector<std::string> reports(count);
    std::vector<std::string> rows(count);
    std::vector<std::exception_ptr> errors(count);

    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("ADIACHECK_THREADS")) {
        const long parsed_count = std::strtol(env, nullptr, 10);
        if (parsed_count > 0) threads = static_cast<unsigned>(parsed_count);
    }
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                const PipelineResult r = run_pipeline(items[i]);
                reports[i] = build_report(items[i], r).dump(2) + "\n";
                std::ostringstream row;
                row << fmt17(sweep.values[i]) << "," << fmt17(r.conditions.traditional.max)
                    << "," << fmt17(r.conditions.sufficient.total) << ","
                    << fmt17(r.evolution.final_fidelity) << ","
                    << fmt17(r.conditions.epsilon_total) << ","
                    << to_string(r.conditions.verdict.classification);
                rows[i] = row.str();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (std::size_t i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    fs::create_directories(config.csv_dir);
    for (std::size_t i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "report_%03zu.json", i);
        write_text_file(config.csv_dir + "/" + name, reports[i]);
    }
    std::ostringstream aggregate;
    aggregate << "value,max_ratio,sufficient_total,final_population,epsilon_total,"
                 "classification\n";
    for (std::size_t i = 0; i < count; ++i) aggregate << rows[i] << "\n";
    write_text_file(config.csv_dir + "/sweep.csv", aggregate.str());
    std::cout << "wrote " << count << " reports and " << config.csv_dir
              << "/sweep.csv\n";
    return 0;
}

}  // namespace adia::cli

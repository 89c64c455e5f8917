#pragma once

#include <abnet/cli/template.hpp>
#include <abnet/conserved/conserved.hpp>
#include <abnet/core/errors.hpp>
#include <abnet/core/parallel.hpp>
#include <abnet/core/rng.hpp>
#include <abnet/dynamics/dynamics.hpp>
#include <abnet/io/json_io.hpp>
#include <abnet/model/network.hpp>
#include <abnet/model/toppling_matrix.hpp>
#include <abnet/model/validate.hpp>
#include <abnet/spectral/classify.hpp>
#include <abnet/spectral/criticality.hpp>
#include <abnet/walk/viable.hpp>
#include <abnet/walk/walk.hpp>

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace abnet::cli {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kDomainFailure = 1, kInputError = 2 };

/// Primary output plus diagnostics. Only `output` is covered by the digest.
struct CommandResult {
    int exit_code = kSuccess;
    std::string output;
    std::string message;
};

/// FNV-1a, 64 bit, rendered as 16 hex digits.
inline std::string digest(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline std::uint64_t uint_param(const json& params, const char* key, std::uint64_t fallback) {
    if (!params.contains(key) || params.at(key).is_null()) return fallback;
    const auto& j = params.at(key);
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    throw SchemaError(std::string("--") + key + ": expected a nonnegative integer");
}

inline double real_param(const json& params, const char* key, double fallback) {
    if (!params.contains(key) || params.at(key).is_null()) return fallback;
    if (!params.at(key).is_number()) throw SchemaError(std::string("--") + key + ": expected a number");
    return params.at(key).get<double>();
}

inline std::string string_param(const json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_string() || params.at(key).get<std::string>().empty())
        throw SchemaError(std::string("missing required option --") + key);
    return params.at(key).get<std::string>();
}

inline std::uint64_t require_seed(const json& params) {
    if (!params.contains("seed") || params.at("seed").is_null())
        throw SchemaError("randomized commands require an explicit --seed");
    return uint_param(params, "seed", 0);
}

inline bool pretty(const json& params) { return params.value("pretty", false); }

inline std::size_t jobs(const json& params) { return std::max<std::uint64_t>(1, uint_param(params, "jobs", 1)); }

inline IntVector eta_param(const json& params, const NetworkSpec& spec, const IntVector& fallback) {
    if (!params.contains("eta") || params.at("eta").is_null()) return fallback;
    return parse_configuration(params.at("eta"), spec);
}

inline GlobalEnv q0_param(const json& params, const NetworkSpec& spec) {
    if (!params.contains("q0") || params.at("q0").is_null()) return spec.first_env();
    return parse_environment(params.at("q0"), spec);
}

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    const bool scalar_array = j.is_array() && std::none_of(j.begin(), j.end(), [](const json& x) {
                                  return x.is_object() || x.is_array();
                              });
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array() && !scalar_array) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

/// Aligned "key  value" lines.
inline std::string pretty_text(const json& j) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    std::size_t width = 0;
    for (const auto& [k, _] : rows) width = std::max(width, k.size());
    std::string out;
    for (const auto& [k, v] : rows) out += k + std::string(width - k.size() + 2, ' ') + v + "\n";
    return out;
}

inline std::string render(const json& j, const json& params) { return pretty(params) ? pretty_text(j) : j.dump() + "\n"; }

struct HardChecks {
    json report;
    bool ok = true;
};

/// MOLI, BFB, environment primitivity and primitivity of M + αI are hard
/// requirements; edge support and uniform-exponent IRR are advisory.
inline HardChecks run_validation(const NetworkSpec& spec) {
    HardChecks hc;
    json& r = hc.report;
    json warnings = json::array();

    auto violations_json = [&](const ValidationReport& rep) {
        json arr = json::array();
        for (const auto& x : rep.violations)
            arr.push_back({{"vertex", spec.vertices[x.vertex]},
                           {"state", spec.env[x.vertex].states[x.state]},
                           {"atom", x.atom},
                           {"coordinate", spec.vertices[x.coordinate]},
                           {"value", x.value}});
        return arr;
    };

    const auto moli = validate_moli(spec);
    const auto bfb = validate_bfb(spec);
    r["moli"] = {{"ok", moli.ok()}, {"violations", violations_json(moli)}};
    r["bfb"] = {{"ok", bfb.ok()}, {"K", bfb.max_threshold}, {"violations", violations_json(bfb)}};
    hc.ok = moli.ok() && bfb.ok();

    const auto edges = validate_edge_support(spec);
    for (const auto& x : edges.violations)
        warnings.push_back("edge support: " + describe(spec, x) + " has no edge (" + spec.vertices[x.vertex] + ", " +
                           spec.vertices[x.coordinate] + ")");

    json envs = json::array();
    bool envs_ok = true;
    std::vector<RealVector> stationary;
    for (Vertex v = 0; v < spec.size(); ++v) {
        try {
            stationary.push_back(stationary_distribution(spec.env[v].transition));
            envs.push_back({{"vertex", spec.vertices[v]}, {"ok", true}, {"stationary", stationary.back()}});
        } catch (const DomainError& e) {
            envs_ok = false;
            envs.push_back({{"vertex", spec.vertices[v]}, {"ok", false}, {"error", e.what()}});
        }
    }
    r["environments"] = std::move(envs);
    hc.ok = hc.ok && envs_ok;

    if (envs_ok) {
        const auto tm = toppling_matrix(spec, stationary);
        r["M"] = matrix_json(tm.entries);
        r["alpha"] = tm.alpha;
        const auto irr = validate_irr(tm);
        json jirr{{"ok", irr.ok()}, {"strongly_connected", irr.strongly_connected}};
        if (irr.exponent) jirr["exponent"] = *irr.exponent;
        if (irr.witness) {
            jirr["witness"] = {spec.vertices[irr.witness->first], spec.vertices[irr.witness->second]};
            warnings.push_back("IRR: no single exponent makes every off-diagonal entry of (M - Diag M)^k positive");
        }
        r["irr"] = std::move(jirr);
        if (moli.ok()) {
            const auto prim = check_primitive(tm.shifted());
            json jp{{"ok", prim.ok()}};
            if (prim.exponent) jp["exponent"] = *prim.exponent;
            if (prim.witness) jp["witness"] = {spec.vertices[prim.witness->first], spec.vertices[prim.witness->second]};
            r["primitive"] = std::move(jp);
            hc.ok = hc.ok && prim.ok();
        }
    }
    r["warnings"] = std::move(warnings);
    r["ok"] = hc.ok;
    return hc;
}

inline NetworkSpec require_valid_spec(const json& params) {
    NetworkSpec spec = load_spec(string_param(params, "spec"));
    const auto hc = run_validation(spec);
    if (!hc.ok) throw DomainError("spec fails validation; run `abnet validate` for details");
    return spec;
}

struct Classified {
    SpectralReport report;
    std::optional<DetectionResult> detection;
    Regime regime;
};

inline Classified classify_spec(const NetworkSpec& spec, double eps) {
    Classified c;
    c.report = criticality(spec);
    if (std::abs(c.report.rho) <= eps) c.detection = detect(spec, c.report, eps);
    c.regime = classify(c.report, c.detection, eps);
    return c;
}

}  // namespace detail

inline CommandResult cmd_validate(const json& params) {
    const NetworkSpec spec = load_spec(detail::string_param(params, "spec"));
    const auto hc = detail::run_validation(spec);
    CommandResult res;
    res.output = detail::render(hc.report, params);
    res.exit_code = hc.ok ? kSuccess : kDomainFailure;
    if (!hc.ok) res.message = "validation failed";
    return res;
}

inline CommandResult cmd_classify(const json& params) {
    const NetworkSpec spec = detail::require_valid_spec(params);
    const double eps = detail::real_param(params, "eps", 1e-9);
    const auto c = detail::classify_spec(spec, eps);
    json out = spectral_json(c.report, c.regime);
    if (c.detection) out["detection"] = detection_json(spec, *c.detection);
    return {kSuccess, detail::render(out, params), ""};
}

inline CommandResult cmd_simulate(const json& params) {
    const NetworkSpec spec = detail::require_valid_spec(params);
    const RngStream master(detail::require_seed(params));
    if (!params.contains("eta") || params.at("eta").is_null()) throw SchemaError("missing required option --eta");
    const IntVector eta0 = parse_configuration(params.at("eta"), spec);
    const GlobalEnv q0 = detail::q0_param(params, spec);
    const std::uint64_t runs = detail::uint_param(params, "runs", 1);
    const RunOptions opts{detail::uint_param(params, "max_steps", 1'000'000),
                          detail::uint_param(params, "snapshot_every", 0)};
    const LegalStepper stepper(spec);
    std::vector<std::string> lines(runs);
    parallel_for(runs, detail::jobs(params), [&](std::size_t i) {
        RngStream rng = master.split(i);
        json j = run_outcome_json(spec, run_legal(stepper, eta0, q0, opts, rng));
        j["run"] = i;
        lines[i] = detail::pretty(params) ? detail::pretty_text(j) : j.dump() + "\n";
    });
    CommandResult res;
    for (const auto& l : lines) res.output += l;
    return res;
}

inline CommandResult cmd_walk(const json& params) {
    const NetworkSpec spec = detail::require_valid_spec(params);
    const RngStream master(detail::require_seed(params));
    const IntVector eta0 = detail::eta_param(params, spec, spec.threshold);
    const GlobalEnv q0 = detail::q0_param(params, spec);
    const std::uint64_t n = detail::uint_param(params, "excursions", 10'000);
    const auto report = criticality(spec);
    WalkOptions opts;
    opts.jobs = detail::jobs(params);
    opts.excursion_cap = detail::uint_param(params, "excursion_cap", opts.excursion_cap);
    const auto records = run_walk(spec, report, eta0, q0, n, master, opts);
    json out{{"rho", report.rho}, {"p", report.p}, {"q0", environment_json(spec, q0)}};
    if (records.size() >= 2) out["drift"] = drift_json(drift_report(records, report));
    auto cells = cells_json(spec, excursion_sums_check(records, spec, report));
    cells["sufficient_records"] = records.size() >= 10'000;
    out["excursions"] = std::move(cells);
    return {kSuccess, detail::render(out, params), ""};
}

inline CommandResult cmd_survive(const json& params) {
    const NetworkSpec spec = detail::require_valid_spec(params);
    const RngStream master(detail::require_seed(params));
    const GlobalEnv q0 = detail::q0_param(params, spec);
    const std::uint64_t horizon = detail::uint_param(params, "horizon", 100'000);
    const std::uint64_t runs = detail::uint_param(params, "runs", 1000);
    json out = json::object();
    IntVector eta0;
    if (params.contains("eta") && params.at("eta").is_string() && params.at("eta").get<std::string>() == "viable") {
        const auto report = criticality(spec);
        ViableOptions vo;
        vo.jobs = detail::jobs(params);
        const auto cand = find_viable(spec, report, q0, master.split(0), detail::uint_param(params, "viable_horizon", 1000),
                                      detail::uint_param(params, "viable_trials", 200), vo);
        eta0 = cand.eta;
        out["viable"] = {{"multiplier", cand.multiplier},
                         {"frequency", cand.frequency()},
                         {"trials", cand.trials},
                         {"min_returns", cand.min_returns}};
    } else {
        if (!params.contains("eta") || params.at("eta").is_null())
            throw SchemaError("missing required option --eta (a configuration or \"viable\")");
        eta0 = parse_configuration(params.at("eta"), spec);
    }
    const auto surv = survival_experiment(spec, eta0, q0, horizon, runs, master.split(1), detail::jobs(params));
    out["eta0"] = configuration_json(spec, eta0);
    out["horizon"] = horizon;
    out["survival"] = survival_json(surv);
    return {kSuccess, detail::render(out, params), ""};
}

inline CommandResult cmd_conserved(const json& params) {
    const NetworkSpec spec = detail::require_valid_spec(params);
    RngStream rng(detail::require_seed(params));
    const double eps = detail::real_param(params, "eps", 1e-9);
    const auto report = criticality(spec);
    const auto result = detect(spec, report, eps);
    json out{{"rho", report.rho}, {"detection", detection_json(spec, result)}};
    if (const auto* cq = std::get_if<ConservedQuantity>(&result)) {
        const auto [eta0, q0] = unstable_initial_state(*cq, spec);
        const std::uint64_t steps = detail::uint_param(params, "steps", 1000);
        const auto run = run_legal(spec, eta0, q0, RunOptions{steps, 1}, rng);
        const auto check = verify_conserved(*cq, run.trajectory);
        out["unstable_initial_state"] = {{"eta", configuration_json(spec, eta0)}, {"q", environment_json(spec, q0)}};
        out["verification"] = {{"steps", run.steps},
                               {"stabilized", run.tag == RunTag::Stabilized},
                               {"max_deviation", check.max_deviation},
                               {"tolerance", check.tolerance},
                               {"ok", check.ok()}};
    }
    return {kSuccess, detail::render(out, params), ""};
}

/// Grid values from "0.5,1,2", a JSON array, or "start:stop:step".
inline std::vector<double> parse_grid(const json& j) {
    std::vector<double> grid;
    if (j.is_null()) return grid;
    if (j.is_array()) {
        for (const auto& x : j) {
            if (!x.is_number()) throw SchemaError("--grid: expected numbers");
            grid.push_back(x.get<double>());
        }
        return grid;
    }
    if (!j.is_string()) throw SchemaError("--grid: expected a list");
    const std::string s = j.get<std::string>();
    auto to_double = [](const std::string& tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw SchemaError("--grid: cannot parse '" + tok + "'");
        }
        if (used != tok.size()) throw SchemaError("--grid: cannot parse '" + tok + "'");
        return v;
    };
    if (s.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(s);
        for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(to_double(tok));
        if (parts.size() != 3 || !(parts[2] > 0.0)) throw SchemaError("--grid: range must be start:stop:step");
        const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
        for (std::size_t i = 0; i < count && parts[0] <= parts[1]; ++i) grid.push_back(parts[0] + i * parts[2]);
        return grid;
    }
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) grid.push_back(to_double(tok));
    return grid;
}

inline CommandResult cmd_sweep(const json& params) {
    const std::string path = detail::string_param(params, "template");
    const std::string name = detail::string_param(params, "param");
    const std::uint64_t seed = detail::require_seed(params);
    const auto grid = parse_grid(params.value("grid", json()));
    const double eps = detail::real_param(params, "eps", 1e-9);
    const std::uint64_t horizon = detail::uint_param(params, "horizon", 10'000);
    const std::uint64_t runs = detail::uint_param(params, "runs", 100);

    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open template '" + path + "'");
    json tmpl;
    try {
        tmpl = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("template: malformed JSON: ") + e.what());
    }

    std::string csv = "value,rho,regime,survival_fraction\n";
    const RngStream master(seed);
    for (std::size_t row = 0; row < grid.size(); ++row) {
        const NetworkSpec spec = parse_spec(instantiate_template(tmpl, name, grid[row]));
        if (!detail::run_validation(spec).ok)
            throw DomainError("sweep: instance at " + name + " = " + json(grid[row]).dump() + " fails validation");
        const auto c = detail::classify_spec(spec, eps);
        IntVector eta0 = spec.threshold;
        for (auto& x : eta0) x += 2;
        eta0 = detail::eta_param(params, spec, eta0);
        const auto surv = survival_experiment(spec, eta0, spec.first_env(), horizon, runs, master.split(row),
                                              detail::jobs(params));
        csv += json(grid[row]).dump() + "," + json(c.report.rho).dump() + "," +
               std::string(regime_name(c.regime.tag)) + "," + json(surv.fraction()).dump() + "\n";
    }
    return {kSuccess, csv, ""};
}

inline const std::map<std::string, std::function<CommandResult(const json&)>>& command_table() {
    static const std::map<std::string, std::function<CommandResult(const json&)>> table{
        {"validate", cmd_validate}, {"classify", cmd_classify}, {"simulate", cmd_simulate},
        {"walk", cmd_walk},         {"survive", cmd_survive},   {"conserved", cmd_conserved},
        {"sweep", cmd_sweep}};
    return table;
}

/// Dispatches a command and maps library errors onto the exit-code contract.
inline CommandResult run_command(const std::string& command, const json& params) {
    const auto& table = command_table();
    const auto it = table.find(command);
    if (it == table.end()) return {kInputError, "", "unknown command '" + command + "'"};
    try {
        return it->second(params);
    } catch (const InputError& e) {
        return {kInputError, "", e.what()};
    } catch (const DomainError& e) {
        return {kDomainFailure, "", e.what()};
    } catch (const json::exception& e) {
        return {kInputError, "", e.what()};
    }
}

/// Record of one invocation; replaying it must reproduce `output_digest`.
inline json make_manifest(const std::string& command, const json& params, const CommandResult& result) {
    return {{"tool", "abnet"},
            {"version", kToolVersion},
            {"command", command},
            {"spec", params.value("spec", params.value("template", ""))},
            {"params", params},
            {"exit_code", result.exit_code},
            {"output_digest", digest(result.output)}};
}

inline CommandResult replay_manifest(const json& manifest) {
    if (!manifest.is_object() || !manifest.contains("command") || !manifest.contains("params") ||
        !manifest.contains("output_digest"))
        return {kInputError, "", "manifest: missing command, params or output_digest"};
    const auto result = run_command(manifest.at("command").get<std::string>(), manifest.at("params"));
    const std::string actual = digest(result.output);
    const std::string expected = manifest.at("output_digest").get<std::string>();
    const bool same = actual == expected;
    json out{{"expected_digest", expected}, {"actual_digest", actual}, {"identical", same}};
    return {same ? kSuccess : kDomainFailure, out.dump() + "\n", same ? "" : "output differs from manifest"};
}

}  // namespace abnet::cli

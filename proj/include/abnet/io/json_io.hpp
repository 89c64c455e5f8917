#pragma once

#include <abnet/conserved/conserved.hpp>
#include <abnet/dynamics/dynamics.hpp>
#include <abnet/model/network.hpp>
#include <abnet/spectral/classify.hpp>
#include <abnet/spectral/criticality.hpp>
#include <abnet/walk/viable.hpp>
#include <abnet/walk/walk.hpp>

#include "json.hpp"

#include <string>
#include <variant>

namespace abnet {

using nlohmann::json;

/// Accepts {"u": 3, ...} (missing vertices are 0) or [3, ...] in vertex order.
inline IntVector parse_configuration(const json& j, const NetworkSpec& spec) {
    IntVector eta(spec.size(), 0);
    if (j.is_array()) {
        if (j.size() != spec.size()) throw SchemaError("eta: array must list one count per vertex");
        for (std::size_t v = 0; v < spec.size(); ++v) eta[v] = detail::as_count(j[v], "eta");
    } else if (j.is_object()) {
        for (const auto& [name, val] : j.items()) {
            const auto v = spec.find_vertex(name);
            if (!v) throw ReferenceError("eta: unknown vertex '" + name + "'");
            eta[*v] = detail::as_count(val, "eta." + name);
        }
    } else {
        throw SchemaError("eta: expected an object or an array");
    }
    return eta;
}

/// Accepts {"u": "good", ...} (missing vertices take their first state) or
/// ["good", ...] in vertex order.
inline GlobalEnv parse_environment(const json& j, const NetworkSpec& spec) {
    GlobalEnv q = spec.first_env();
    auto lookup = [&](Vertex v, const json& js) {
        const std::string name = detail::as_string(js, "q0");
        const auto s = spec.find_state(v, name);
        if (!s) throw ReferenceError("q0: unknown state '" + name + "' for vertex '" + spec.vertices[v] + "'");
        q[v] = *s;
    };
    if (j.is_array()) {
        if (j.size() != spec.size()) throw SchemaError("q0: array must list one state per vertex");
        for (std::size_t v = 0; v < spec.size(); ++v) lookup(v, j[v]);
    } else if (j.is_object()) {
        for (const auto& [name, val] : j.items()) {
            const auto v = spec.find_vertex(name);
            if (!v) throw ReferenceError("q0: unknown vertex '" + name + "'");
            lookup(*v, val);
        }
    } else {
        throw SchemaError("q0: expected an object or an array");
    }
    return q;
}

inline json configuration_json(const NetworkSpec& spec, const IntVector& eta) {
    json j = json::object();
    for (Vertex v = 0; v < spec.size(); ++v) j[spec.vertices[v]] = eta[v];
    return j;
}

inline json environment_json(const NetworkSpec& spec, const GlobalEnv& q) {
    json j = json::object();
    for (Vertex v = 0; v < spec.size(); ++v) j[spec.vertices[v]] = spec.env[v].states[q[v]];
    return j;
}

inline json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json spectral_json(const SpectralReport& report, const Regime& regime) {
    return json{{"rho", report.rho},
                {"r", report.r},
                {"alpha", report.alpha()},
                {"p", report.p},
                {"a", report.a},
                {"regime", std::string(regime_name(regime.tag))},
                {"eps", regime.tolerance},
                {"primitivity_exponent", report.primitivity_exponent},
                {"M", matrix_json(report.matrix.entries)},
                {"iterations", {{"left", report.left_iterations}, {"right", report.right_iterations}}}};
}

inline json detection_json(const NetworkSpec& spec, const DetectionResult& result) {
    return std::visit(
        [&](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ConservedQuantity>) {
                json phi = json::object(), Phi = json::object();
                for (Vertex v = 0; v < spec.size(); ++v)
                    for (StateIndex s = 0; s < spec.env[v].size(); ++s) {
                        const std::string key = spec.vertices[v] + "/" + spec.env[v].states[s];
                        phi[key] = r.phi[v][s];
                        Phi[key] = r.Phi[v][s];
                    }
                return {{"found", true}, {"a", r.a}, {"phi", phi}, {"Phi", Phi}};
            } else if constexpr (std::is_same_v<T, RhoNonzero>) {
                return {{"found", false}, {"witness", {{"kind", "rho_nonzero"}, {"rho", r.rho}}}};
            } else if constexpr (std::is_same_v<T, NonConstantInner>) {
                const auto& atoms = spec.rules[r.vertex][r.state].atoms;
                return {{"found", false},
                        {"witness",
                         {{"kind", "non_constant_inner"},
                          {"vertex", spec.vertices[r.vertex]},
                          {"state", spec.env[r.vertex].states[r.state]},
                          {"atoms", {r.first_atom, r.second_atom}},
                          {"deltas", {configuration_json(spec, atoms[r.first_atom].delta),
                                      configuration_json(spec, atoms[r.second_atom].delta)}},
                          {"inner_products", {r.first_value, r.second_value}}}}};
            } else {
                return {{"found", false},
                        {"witness",
                         {{"kind", "potential_infeasible"},
                          {"vertex", spec.vertices[r.vertex]},
                          {"from", spec.env[r.vertex].states[r.from]},
                          {"to", spec.env[r.vertex].states[r.to]},
                          {"potential_difference", r.potential_difference},
                          {"required", r.required}}}};
            }
        },
        result);
}

inline json run_outcome_json(const NetworkSpec& spec, const RunOutcome& out) {
    json j{{"tag", out.tag == RunTag::Stabilized ? "stabilized" : "cutoff"},
           {"steps", out.steps},
           {"final", {{"eta", configuration_json(spec, out.final.eta)}, {"q", environment_json(spec, out.final.q)}}},
           {"at_or_above_throughout", out.at_or_above_throughout}};
    if (!out.trajectory.empty()) {
        json traj = json::array();
        for (const auto& s : out.trajectory)
            traj.push_back({{"n", s.n}, {"eta", s.cfg.eta}, {"q", environment_json(spec, s.cfg.q)}});
        j["trajectory"] = std::move(traj);
    }
    return j;
}

inline json drift_json(const DriftReport& d) {
    return {{"n_excursions", d.n_excursions},
            {"mean_tau", d.mean_tau},
            {"mean_tau_se", d.mean_tau_se},
            {"mean_increment", d.mean_increment},
            {"increment_se", d.increment_se},
            {"predicted", d.predicted},
            {"z_scores", d.z_scores},
            {"n_sigma", d.n_sigma},
            {"within_band", d.within_band()}};
}

inline json cells_json(const NetworkSpec& spec, const ExcursionSumsVerdict& v) {
    json cells = json::array();
    for (const auto& c : v.cells)
        cells.push_back({{"vertex", spec.vertices[c.vertex]},
                         {"env", environment_json(spec, c.env)},
                         {"mean_visits", c.mean_visits},
                         {"standard_error", c.standard_error},
                         {"expected", c.expected},
                         {"pass", c.pass}});
    return {{"mean_tau", v.mean_tau}, {"n_sigma", v.n_sigma}, {"pass", v.pass}, {"cells", std::move(cells)}};
}

inline json survival_json(const SurvivalResult& s) {
    return {{"runs", s.runs},
            {"survived", s.survived},
            {"fraction", s.fraction()},
            {"ci95", {s.ci.lower, s.ci.upper}}};
}

}  // namespace abnet

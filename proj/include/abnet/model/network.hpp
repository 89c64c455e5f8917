#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/matrix.hpp>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace abnet {

using Count = std::int64_t;
using Vertex = std::size_t;
using StateIndex = std::size_t;

/// Integer vector over V (particle counts, toppling instructions, odometers).
using IntVector = std::vector<Count>;
using RealVector = std::vector<double>;

/// One state per vertex, as indices into the vertex's declared state list.
using GlobalEnv = std::vector<StateIndex>;

inline constexpr double kProbabilityTolerance = 1e-12;

struct Atom {
    IntVector delta;
    double prob = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite-support law of the instruction emitted by one (vertex, state) pair.
struct TopplingDistribution {
    std::vector<Atom> atoms;

    friend bool operator==(const TopplingDistribution&, const TopplingDistribution&) = default;
};

struct EnvironmentSpec {
    std::vector<std::string> states;
    Matrix transition;  // row-stochastic, |states| x |states|

    std::size_t size() const { return states.size(); }

    friend bool operator==(const EnvironmentSpec&, const EnvironmentSpec&) = default;
};

/// A fully resolved network. Vertex and state order follow declaration order
/// in the source document and index every vector and matrix in the library.
struct NetworkSpec {
    std::vector<std::string> vertices;
    std::vector<std::pair<Vertex, Vertex>> edges;
    IntVector threshold;
    std::vector<EnvironmentSpec> env;
    std::vector<std::vector<TopplingDistribution>> rules;  // rules[v][s]

    std::size_t size() const { return vertices.size(); }

    std::optional<Vertex> find_vertex(std::string_view name) const {
        for (Vertex v = 0; v < vertices.size(); ++v)
            if (vertices[v] == name) return v;
        return std::nullopt;
    }

    std::optional<StateIndex> find_state(Vertex v, std::string_view name) const {
        const auto& states = env.at(v).states;
        for (StateIndex s = 0; s < states.size(); ++s)
            if (states[s] == name) return s;
        return std::nullopt;
    }

    const TopplingDistribution& rule(Vertex v, StateIndex s) const {
        if (v >= rules.size() || s >= rules[v].size())
            throw UnknownRule("no toppling rule for vertex index " + std::to_string(v) +
                              ", state index " + std::to_string(s));
        return rules[v][s];
    }

    bool has_edge(Vertex from, Vertex to) const {
        for (const auto& [a, b] : edges)
            if (a == from && b == to) return true;
        return false;
    }

    /// K = max_v t(v).
    Count max_threshold() const {
        Count k = 0;
        for (Count t : threshold) k = std::max(k, t);
        return k;
    }

    /// Number of global environments |S| = prod_v |S_v|.
    std::size_t global_env_count() const {
        std::size_t n = 1;
        for (const auto& e : env) n *= e.size();
        return n;
    }

    /// Mixed-radix code of a global environment, first vertex least significant.
    std::size_t encode_env(const GlobalEnv& q) const {
        std::size_t code = 0;
        std::size_t radix = 1;
        for (Vertex v = 0; v < env.size(); ++v) {
            code += q[v] * radix;
            radix *= env[v].size();
        }
        return code;
    }

    GlobalEnv decode_env(std::size_t code) const {
        GlobalEnv q(env.size());
        for (Vertex v = 0; v < env.size(); ++v) {
            q[v] = code % env[v].size();
            code /= env[v].size();
        }
        return q;
    }

    /// The global environment made of every vertex's first declared state.
    GlobalEnv first_env() const { return GlobalEnv(size(), 0); }

    std::string env_label(const GlobalEnv& q) const {
        std::string out;
        for (Vertex v = 0; v < q.size(); ++v) {
            if (v) out += ',';
            out += env[v].states[q[v]];
        }
        return out;
    }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw SchemaError(where + ": missing required field '" + key + "'");
    return obj.at(key);
}

inline Count as_count(const json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<Count>();
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (std::isfinite(d) && std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<Count>(d);
    }
    throw SchemaError(where + ": expected an integer");
}

inline double as_real(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + ": expected a number");
    return j.get<double>();
}

inline std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw SchemaError(where + ": expected a string");
    return j.get<std::string>();
}

inline Matrix parse_transition(const json& j, std::size_t n, const std::string& where) {
    Matrix m(n, n);
    if (!j.is_array()) throw SchemaError(where + ": transition must be an array");
    const bool nested = !j.empty() && j.front().is_array();
    if (nested) {
        if (j.size() != n) throw SchemaError(where + ": transition must have one row per state");
        for (std::size_t r = 0; r < n; ++r) {
            if (!j[r].is_array() || j[r].size() != n)
                throw SchemaError(where + ": transition row " + std::to_string(r) + " has wrong length");
            for (std::size_t c = 0; c < n; ++c) m(r, c) = as_real(j[r][c], where);
        }
    } else {
        if (j.size() != n * n) throw SchemaError(where + ": flat transition must have |S|^2 entries");
        for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = as_real(j[i], where);
    }
    for (std::size_t r = 0; r < n; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (!(m(r, c) >= 0.0) || !std::isfinite(m(r, c)))
                throw SchemaError(where + ": transition entries must be finite and nonnegative");
            sum += m(r, c);
        }
        if (std::abs(sum - 1.0) > kProbabilityTolerance)
            throw SchemaError(where + ": transition row " + std::to_string(r) + " sums to " +
                              std::to_string(sum) + ", not 1");
    }
    return m;
}

}  // namespace detail

/// Builds a NetworkSpec from the JSON spec document.
inline NetworkSpec parse_spec(const nlohmann::json& doc) {
    using detail::as_count;
    using detail::as_real;
    using detail::as_string;
    using detail::require;

    if (!doc.is_object()) throw SchemaError("spec: top level must be an object");
    NetworkSpec spec;

    const auto& verts = require(doc, "vertices", "spec");
    if (!verts.is_array() || verts.empty()) throw SchemaError("vertices: expected a nonempty array");
    for (const auto& jv : verts) {
        std::string name = as_string(jv, "vertices");
        if (name.empty() || name.find('/') != std::string::npos)
            throw SchemaError("vertices: names must be nonempty and must not contain '/'");
        if (spec.find_vertex(name)) throw DuplicateError("vertices: duplicate vertex '" + name + "'");
        spec.vertices.push_back(std::move(name));
    }
    const std::size_t n = spec.size();

    auto vertex_ref = [&](const nlohmann::json& j, const std::string& where) -> Vertex {
        const std::string name = as_string(j, where);
        if (auto v = spec.find_vertex(name)) return *v;
        throw ReferenceError(where + ": unknown vertex '" + name + "'");
    };

    const auto& edges = require(doc, "edges", "spec");
    if (!edges.is_array()) throw SchemaError("edges: expected an array");
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2) throw SchemaError("edges: each edge must be [from, to]");
        const Vertex a = vertex_ref(e[0], "edges");
        const Vertex b = vertex_ref(e[1], "edges");
        if (spec.has_edge(a, b))
            throw DuplicateError("edges: duplicate edge [" + spec.vertices[a] + ", " + spec.vertices[b] + "]");
        spec.edges.emplace_back(a, b);
    }

    const auto& thr = require(doc, "threshold", "spec");
    if (!thr.is_object()) throw SchemaError("threshold: expected an object");
    for (const auto& [key, _] : thr.items())
        if (!spec.find_vertex(key)) throw ReferenceError("threshold: unknown vertex '" + key + "'");
    spec.threshold.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        const std::string& name = spec.vertices[v];
        if (!thr.contains(name)) throw SchemaError("threshold: missing value for vertex '" + name + "'");
        const Count t = as_count(thr.at(name), "threshold." + name);
        if (t < 0) throw SchemaError("threshold." + name + ": must be nonnegative");
        spec.threshold[v] = t;
    }

    const auto& envs = require(doc, "environments", "spec");
    if (!envs.is_object()) throw SchemaError("environments: expected an object");
    for (const auto& [key, _] : envs.items())
        if (!spec.find_vertex(key)) throw ReferenceError("environments: unknown vertex '" + key + "'");
    spec.env.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        const std::string& name = spec.vertices[v];
        const std::string where = "environments." + name;
        if (!envs.contains(name)) throw SchemaError("environments: missing entry for vertex '" + name + "'");
        const auto& je = envs.at(name);
        const auto& states = require(je, "states", where);
        if (!states.is_array() || states.empty()) throw SchemaError(where + ".states: expected a nonempty array");
        EnvironmentSpec e;
        for (const auto& js : states) {
            std::string s = as_string(js, where + ".states");
            for (const auto& existing : e.states)
                if (existing == s) throw DuplicateError(where + ".states: duplicate state '" + s + "'");
            e.states.push_back(std::move(s));
        }
        e.transition = detail::parse_transition(require(je, "transition", where), e.size(), where + ".transition");
        spec.env[v] = std::move(e);
    }

    const auto& rules = require(doc, "rules", "spec");
    if (!rules.is_object()) throw SchemaError("rules: expected an object");
    spec.rules.resize(n);
    std::vector<std::vector<bool>> seen(n);
    for (Vertex v = 0; v < n; ++v) {
        spec.rules[v].resize(spec.env[v].size());
        seen[v].assign(spec.env[v].size(), false);
    }
    for (const auto& [key, jatoms] : rules.items()) {
        const auto slash = key.find('/');
        if (slash == std::string::npos) throw SchemaError("rules: key '" + key + "' must have the form vertex/state");
        const auto v = spec.find_vertex(key.substr(0, slash));
        if (!v) throw ReferenceError("rules: key '" + key + "' names an unknown vertex");
        const auto s = spec.find_state(*v, key.substr(slash + 1));
        if (!s) throw ReferenceError("rules: key '" + key + "' names an unknown state");
        if (!jatoms.is_array() || jatoms.empty())
            throw SchemaError("rules." + key + ": expected a nonempty array of atoms");
        TopplingDistribution dist;
        double total = 0.0;
        for (std::size_t i = 0; i < jatoms.size(); ++i) {
            const std::string where = "rules." + key + "[" + std::to_string(i) + "]";
            const auto& ja = jatoms[i];
            Atom atom;
            atom.delta.assign(n, 0);
            const auto& jd = require(ja, "delta", where);
            if (!jd.is_object()) throw SchemaError(where + ".delta: expected an object");
            for (const auto& [wname, jval] : jd.items()) {
                const auto w = spec.find_vertex(wname);
                if (!w) throw ReferenceError(where + ".delta: unknown vertex '" + wname + "'");
                atom.delta[*w] = as_count(jval, where + ".delta." + wname);
            }
            atom.prob = as_real(require(ja, "prob", where), where + ".prob");
            if (!(atom.prob > 0.0) || !std::isfinite(atom.prob))
                throw SchemaError(where + ".prob: must be positive and finite");
            total += atom.prob;
            dist.atoms.push_back(std::move(atom));
        }
        if (std::abs(total - 1.0) > kProbabilityTolerance)
            throw SchemaError("rules." + key + ": probabilities sum to " + std::to_string(total) + ", not 1");
        spec.rules[*v][*s] = std::move(dist);
        seen[*v][*s] = true;
    }
    for (Vertex v = 0; v < n; ++v)
        for (StateIndex s = 0; s < seen[v].size(); ++s)
            if (!seen[v][s])
                throw SchemaError("rules: missing rule for '" + spec.vertices[v] + "/" + spec.env[v].states[s] + "'");

    return spec;
}

inline NetworkSpec parse_spec_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("spec: malformed JSON: ") + e.what());
    }
    return parse_spec(doc);
}

inline NetworkSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open spec file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

/// Inverse of parse_spec. Zero delta coordinates are omitted.
inline nlohmann::json emit_spec(const NetworkSpec& spec) {
    using nlohmann::json;
    json doc;
    doc["vertices"] = spec.vertices;
    json edges = json::array();
    for (const auto& [a, b] : spec.edges) edges.push_back({spec.vertices[a], spec.vertices[b]});
    doc["edges"] = std::move(edges);
    json thr = json::object();
    for (Vertex v = 0; v < spec.size(); ++v) thr[spec.vertices[v]] = spec.threshold[v];
    doc["threshold"] = std::move(thr);
    json envs = json::object();
    for (Vertex v = 0; v < spec.size(); ++v) {
        const auto& e = spec.env[v];
        json rows = json::array();
        for (std::size_t r = 0; r < e.size(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < e.size(); ++c) row.push_back(e.transition(r, c));
            rows.push_back(std::move(row));
        }
        envs[spec.vertices[v]] = {{"states", e.states}, {"transition", std::move(rows)}};
    }
    doc["environments"] = std::move(envs);
    json rules = json::object();
    for (Vertex v = 0; v < spec.size(); ++v) {
        for (StateIndex s = 0; s < spec.env[v].size(); ++s) {
            json atoms = json::array();
            for (const auto& atom : spec.rules[v][s].atoms) {
                json delta = json::object();
                for (Vertex w = 0; w < spec.size(); ++w)
                    if (atom.delta[w] != 0) delta[spec.vertices[w]] = atom.delta[w];
                atoms.push_back({{"delta", std::move(delta)}, {"prob", atom.prob}});
            }
            rules[spec.vertices[v] + "/" + spec.env[v].states[s]] = std::move(atoms);
        }
    }
    doc["rules"] = std::move(rules);
    return doc;
}

}  // namespace abnet

#pragma once

#include <abnet/model/network.hpp>

#include <string>
#include <vector>

namespace abnet {

/// One offending atom coordinate.
struct Violation {
    Vertex vertex = 0;
    StateIndex state = 0;
    std::size_t atom = 0;
    Vertex coordinate = 0;
    Count value = 0;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::size_t size() const { return violations.size(); }
};

/// Mass only lost internally: delta(w) >= 0 for every w != owner.
inline ValidationReport validate_moli(const NetworkSpec& spec) {
    ValidationReport report;
    for (Vertex v = 0; v < spec.size(); ++v)
        for (StateIndex s = 0; s < spec.rules[v].size(); ++s) {
            const auto& atoms = spec.rules[v][s].atoms;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                for (Vertex w = 0; w < spec.size(); ++w)
                    if (w != v && atoms[i].delta[w] < 0)
                        report.violations.push_back({v, s, i, w, atoms[i].delta[w]});
        }
    return report;
}

struct BfbReport : ValidationReport {
    Count max_threshold = 0;  // K
};

/// Bounded from below: -delta(owner) <= t(owner).
inline BfbReport validate_bfb(const NetworkSpec& spec) {
    BfbReport report;
    report.max_threshold = spec.max_threshold();
    for (Vertex v = 0; v < spec.size(); ++v)
        for (StateIndex s = 0; s < spec.rules[v].size(); ++s) {
            const auto& atoms = spec.rules[v][s].atoms;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                if (-atoms[i].delta[v] > spec.threshold[v])
                    report.violations.push_back({v, s, i, v, atoms[i].delta[v]});
        }
    return report;
}

/// Atoms that move mass from v to w != v without a declared edge (v, w).
/// Reported as warnings only.
inline ValidationReport validate_edge_support(const NetworkSpec& spec) {
    ValidationReport report;
    for (Vertex v = 0; v < spec.size(); ++v)
        for (StateIndex s = 0; s < spec.rules[v].size(); ++s) {
            const auto& atoms = spec.rules[v][s].atoms;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                for (Vertex w = 0; w < spec.size(); ++w)
                    if (w != v && atoms[i].delta[w] != 0 && !spec.has_edge(v, w))
                        report.violations.push_back({v, s, i, w, atoms[i].delta[w]});
        }
    return report;
}

inline std::string describe(const NetworkSpec& spec, const Violation& x) {
    return spec.vertices[x.vertex] + "/" + spec.env[x.vertex].states[x.state] + " atom " +
           std::to_string(x.atom) + ": delta(" + spec.vertices[x.coordinate] +
           ") = " + std::to_string(x.value);
}

}  // namespace abnet

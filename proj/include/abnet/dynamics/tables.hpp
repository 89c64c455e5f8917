#pragma once

#include <abnet/model/network.hpp>

#include <vector>

namespace abnet {

/// Flattened probability rows for the sampling hot loops.
struct SamplingTables {
    std::vector<std::vector<std::vector<double>>> transition;  // [v][r] -> row over S_v
    std::vector<std::vector<std::vector<double>>> atom_probs;  // [v][s] -> probs over atoms

    explicit SamplingTables(const NetworkSpec& spec) {
        const std::size_t n = spec.size();
        transition.resize(n);
        atom_probs.resize(n);
        for (Vertex v = 0; v < n; ++v) {
            const auto& env = spec.env[v];
            transition[v].assign(env.size(), std::vector<double>(env.size()));
            atom_probs[v].resize(env.size());
            for (std::size_t r = 0; r < env.size(); ++r) {
                for (std::size_t c = 0; c < env.size(); ++c) transition[v][r][c] = env.transition(r, c);
                for (const auto& atom : spec.rules[v][r].atoms) atom_probs[v][r].push_back(atom.prob);
            }
        }
    }
};

}  // namespace abnet

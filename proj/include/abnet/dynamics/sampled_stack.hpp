#pragma once

#include <abnet/core/rng.hpp>
#include <abnet/dynamics/tables.hpp>
#include <abnet/model/network.hpp>

#include <string>
#include <vector>

namespace abnet {

/// Instruction stack sampled from the Markovian environment.
///
/// Vertex v owns the chain Y^v_0 = q0(v), Y^v_1, ... and the j-th instruction
/// (0-based) is drawn from ν^{v, Y^v_{j+1}}: the environment steps first and
/// the updated state parameterizes the toppling, as in the legal driver.
/// After m topplings at v its environment is Y^v_m. Draws are memoized and
/// each vertex reads its own split stream, so the realized stack does not
/// depend on the order in which indices are requested.
///
/// Not thread-safe: one writer per instance.
class SampledStack {
public:
    SampledStack(const NetworkSpec& spec, GlobalEnv q0, const RngStream& base) : spec_(&spec), tables_(spec) {
        if (q0.size() != spec.size()) throw SchemaError("sampled stack: q0 has the wrong length");
        vertices_.reserve(spec.size());
        for (Vertex v = 0; v < spec.size(); ++v) {
            if (q0[v] >= spec.env[v].size()) throw SchemaError("sampled stack: q0 names an unknown state");
            vertices_.push_back(PerVertex{base.split(v), {q0[v]}, {}});
        }
    }

    std::size_t vertex_count() const { return vertices_.size(); }

    const IntVector& instruction(Vertex v, std::size_t j) {
        fill(v, j);
        return vertices_[v].instructions[j];
    }

    /// Y^v_m: environment at v after m topplings there.
    StateIndex state_after(Vertex v, std::size_t m) {
        if (m > 0) fill(v, m - 1);
        return vertices_[v].states[m];
    }

    /// State that parameterized instruction j, i.e. Y^v_{j+1}.
    StateIndex instruction_state(Vertex v, std::size_t j) {
        fill(v, j);
        return vertices_[v].states[j + 1];
    }

    /// Global environment after the odometer h.
    GlobalEnv environment(const IntVector& h) {
        GlobalEnv q(vertices_.size());
        for (Vertex v = 0; v < q.size(); ++v) q[v] = state_after(v, static_cast<std::size_t>(h[v]));
        return q;
    }

    std::size_t materialized(Vertex v) const { return vertices_[v].instructions.size(); }

private:
    struct PerVertex {
        RngStream rng;
        std::vector<StateIndex> states;       // Y_0, Y_1, ...
        std::vector<IntVector> instructions;  // I_0, I_1, ...
    };

    void fill(Vertex v, std::size_t j) {
        auto& pv = vertices_.at(v);
        while (pv.instructions.size() <= j) {
            const StateIndex next = pv.rng.categorical(tables_.transition[v][pv.states.back()]);
            const std::size_t atom = pv.rng.categorical(tables_.atom_probs[v][next]);
            pv.states.push_back(next);
            pv.instructions.push_back(spec_->rules[v][next].atoms[atom].delta);
        }
    }

    const NetworkSpec* spec_;
    SamplingTables tables_;
    std::vector<PerVertex> vertices_;
};

}  // namespace abnet

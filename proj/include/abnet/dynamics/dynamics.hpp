#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/rng.hpp>
#include <abnet/dynamics/sampled_stack.hpp>
#include <abnet/dynamics/tables.hpp>
#include <abnet/model/network.hpp>
#include <abnet/stack/stack.hpp>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace abnet {

/// Particle configuration with its global environment.
struct Configuration {
    IntVector eta;
    GlobalEnv q;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// |η − t|₊
inline Count positive_excess(const IntVector& eta, const IntVector& t) {
    Count total = 0;
    for (std::size_t v = 0; v < eta.size(); ++v)
        if (eta[v] > t[v]) total += eta[v] - t[v];
    return total;
}

/// ∃v: η(v) ≥ t(v). Weaker than "not stable": holds on the boundary η(v) = t(v).
inline bool some_vertex_at_or_above(const IntVector& eta, const IntVector& t) {
    for (std::size_t v = 0; v < eta.size(); ++v)
        if (eta[v] >= t[v]) return true;
    return false;
}

/// η ≥ t pointwise and η ≠ t.
inline bool above_threshold_strictly_somewhere(const IntVector& eta, const IntVector& t) {
    bool differs = false;
    for (std::size_t v = 0; v < eta.size(); ++v) {
        if (eta[v] < t[v]) return false;
        if (eta[v] != t[v]) differs = true;
    }
    return differs;
}

/// Picks v with probability max(η(v) − t(v), 0) / |η − t|₊.
inline Vertex select_vertex(const IntVector& eta, const IntVector& t, RngStream& rng) {
    const Count total = positive_excess(eta, t);
    if (total <= 0) throw AlreadyStable("select_vertex: configuration is stable");
    Count ticket = static_cast<Count>(rng.below(static_cast<std::uint64_t>(total)));
    for (Vertex v = 0; v < eta.size(); ++v) {
        if (eta[v] <= t[v]) continue;
        ticket -= eta[v] - t[v];
        if (ticket < 0) return v;
    }
    return eta.size() - 1;  // unreachable
}

inline void check_configuration(const NetworkSpec& spec, const IntVector& eta, const GlobalEnv& q) {
    if (eta.size() != spec.size()) throw SchemaError("configuration: eta has the wrong length");
    if (q.size() != spec.size()) throw SchemaError("configuration: q has the wrong length");
    for (Vertex v = 0; v < spec.size(); ++v)
        if (q[v] >= spec.env[v].size()) throw SchemaError("configuration: unknown state for vertex '" +
                                                          spec.vertices[v] + "'");
}

/// Single-step engine for the legal driver. Draw order per step: vertex,
/// environment transition at that vertex, toppling atom in the new state.
class LegalStepper {
public:
    explicit LegalStepper(const NetworkSpec& spec) : spec_(&spec), tables_(spec) {}

    /// Advances cfg in place; returns the toppled vertex.
    Vertex advance(Configuration& cfg, RngStream& rng) const {
        const Vertex v = select_vertex(cfg.eta, spec_->threshold, rng);
        const StateIndex s = rng.categorical(tables_.transition[v][cfg.q[v]]);
        cfg.q[v] = s;
        const auto& atoms = spec_->rules[v][s].atoms;
        const auto& delta = atoms[rng.categorical(tables_.atom_probs[v][s])].delta;
        for (std::size_t w = 0; w < cfg.eta.size(); ++w) cfg.eta[w] += delta[w];
        return v;
    }

    const NetworkSpec& spec() const { return *spec_; }

private:
    const NetworkSpec* spec_;
    SamplingTables tables_;
};

/// One step of the stochastic network in Markovian environment.
inline Configuration step(const Configuration& cfg, const NetworkSpec& spec, RngStream& rng) {
    Configuration next = cfg;
    LegalStepper(spec).advance(next, rng);
    return next;
}

enum class RunTag { Stabilized, Cutoff };

struct Snapshot {
    std::uint64_t n = 0;
    Configuration cfg;
};

struct RunOutcome {
    RunTag tag = RunTag::Cutoff;
    std::uint64_t steps = 0;
    Configuration final;
    std::vector<Snapshot> trajectory;
    /// ∃v: η_n(v) ≥ t(v) held at every visited n (the ≥-form of "unstable").
    bool at_or_above_throughout = true;
};

struct RunOptions {
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t snapshot_every = 0;  // 0: no trajectory
};

/// Runs the legal driver from (eta0, q0) until stable or max_steps.
inline RunOutcome run_legal(const LegalStepper& stepper, const IntVector& eta0, const GlobalEnv& q0,
                            const RunOptions& opts, RngStream& rng) {
    const auto& spec = stepper.spec();
    check_configuration(spec, eta0, q0);
    RunOutcome out;
    out.final = Configuration{eta0, q0};
    auto& cfg = out.final;
    const auto& t = spec.threshold;
    auto record = [&](std::uint64_t n) {
        if (opts.snapshot_every > 0 && n % opts.snapshot_every == 0) out.trajectory.push_back({n, cfg});
    };
    record(0);
    out.at_or_above_throughout = some_vertex_at_or_above(cfg.eta, t);
    while (true) {
        if (is_stable(cfg.eta, t)) {
            out.tag = RunTag::Stabilized;
            break;
        }
        if (out.steps >= opts.max_steps) {
            out.tag = RunTag::Cutoff;
            break;
        }
        stepper.advance(cfg, rng);
        ++out.steps;
        if (!some_vertex_at_or_above(cfg.eta, t)) out.at_or_above_throughout = false;
        record(out.steps);
    }
    if (opts.snapshot_every > 0 && (out.trajectory.empty() || out.trajectory.back().n != out.steps))
        out.trajectory.push_back({out.steps, cfg});
    return out;
}

inline RunOutcome run_legal(const NetworkSpec& spec, const IntVector& eta0, const GlobalEnv& q0,
                            const RunOptions& opts, RngStream& rng) {
    return run_legal(LegalStepper(spec), eta0, q0, opts, rng);
}

/// Stackwise driver: vertices chosen as in the legal driver, instructions
/// read from `stack`. Returns the stack state and the toppled sequence.
template <InstructionSource Stack>
std::pair<StackState, ToppleSequence> run_stackwise(const IntVector& eta0, Stack& stack, const IntVector& t,
                                                    std::uint64_t max_steps, RngStream& rng) {
    StackState st = StackState::start(eta0);
    ToppleSequence seq;
    while (!is_stable(st.eta, t) && seq.size() < max_steps) {
        const Vertex v = select_vertex(st.eta, t, rng);
        topple_in_place(st, v, stack);
        seq.push_back(v);
    }
    return {std::move(st), std::move(seq)};
}

}  // namespace abnet

#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/model/network.hpp>

#include "json.hpp"

#include <concepts>
#include <string>
#include <utility>
#include <vector>

namespace abnet {

using ToppleSequence = std::vector<Vertex>;

/// Anything that serves the j-th instruction of vertex v. Reading index j
/// must never change the instruction at any other index.
template <typename S>
concept InstructionSource = requires(S& stack, Vertex v, std::size_t j) {
    { stack.instruction(v, j) } -> std::convertible_to<const IntVector&>;
    { stack.vertex_count() } -> std::convertible_to<std::size_t>;
};

/// Fully materialized deterministic stack: instructions[v][j] is I^v_j.
class MaterializedStack {
public:
    MaterializedStack() = default;
    explicit MaterializedStack(std::vector<std::vector<IntVector>> instructions)
        : instructions_(std::move(instructions)) {}

    std::size_t vertex_count() const { return instructions_.size(); }
    std::size_t depth(Vertex v) const { return instructions_.at(v).size(); }

    const IntVector& instruction(Vertex v, std::size_t j) const {
        if (v >= instructions_.size() || j >= instructions_[v].size())
            throw StackExhausted("stack exhausted at vertex index " + std::to_string(v) + ", depth " +
                                 std::to_string(j));
        return instructions_[v][j];
    }

    const std::vector<std::vector<IntVector>>& data() const { return instructions_; }

private:
    std::vector<std::vector<IntVector>> instructions_;
};

/// Configuration in Z^V together with its odometer.
struct StackState {
    IntVector eta;
    IntVector h;

    static StackState start(IntVector eta0) {
        StackState st;
        st.h.assign(eta0.size(), 0);
        st.eta = std::move(eta0);
        return st;
    }

    friend bool operator==(const StackState&, const StackState&) = default;
};

/// Ψ_v(η, h) = (η + I^v_{h(v)}, h + δ_v). The input is left untouched.
template <InstructionSource Stack>
StackState topple(const StackState& state, Vertex v, Stack& stack) {
    const IntVector& instr = stack.instruction(v, static_cast<std::size_t>(state.h[v]));
    StackState next = state;
    for (std::size_t w = 0; w < next.eta.size(); ++w) next.eta[w] += instr[w];
    next.h[v] += 1;
    return next;
}

/// In-place variant used by the drivers.
template <InstructionSource Stack>
void topple_in_place(StackState& state, Vertex v, Stack& stack) {
    const IntVector& instr = stack.instruction(v, static_cast<std::size_t>(state.h[v]));
    for (std::size_t w = 0; w < state.eta.size(); ++w) state.eta[w] += instr[w];
    state.h[v] += 1;
}

inline bool is_legal(const IntVector& eta, Vertex v, const IntVector& t) { return eta[v] > t[v]; }

inline bool is_stable(const IntVector& eta, const IntVector& t) {
    for (std::size_t v = 0; v < eta.size(); ++v)
        if (eta[v] > t[v]) return false;
    return true;
}

struct SequenceResult {
    StackState state;
    std::vector<bool> trace;  // trace[i]: v_i legal for the configuration it toppled

    bool all_legal() const {
        for (bool b : trace)
            if (!b) return false;
        return true;
    }
};

/// Folds topple over seq from (eta0, 0). Legality is recorded, never enforced.
template <InstructionSource Stack>
SequenceResult apply_sequence(const IntVector& eta0, const ToppleSequence& seq, Stack& stack, const IntVector& t) {
    SequenceResult out{StackState::start(eta0), {}};
    out.trace.reserve(seq.size());
    for (Vertex v : seq) {
        out.trace.push_back(is_legal(out.state.eta, v, t));
        topple_in_place(out.state, v, stack);
    }
    return out;
}

/// m(v) = #{i : v_i = v}
inline IntVector odometer(const ToppleSequence& seq, std::size_t n) {
    IntVector m(n, 0);
    for (Vertex v : seq) m.at(v) += 1;
    return m;
}

struct AbelianVerdict {
    StackState first;
    StackState second;
    bool equal = false;
};

/// Final states of two sequences with identical odometers.
template <InstructionSource Stack>
AbelianVerdict check_abelian(const IntVector& eta0, const ToppleSequence& seq1, const ToppleSequence& seq2,
                             Stack& stack) {
    const std::size_t n = eta0.size();
    if (odometer(seq1, n) != odometer(seq2, n))
        throw OdometerMismatch("check_abelian: sequences have different odometers");
    const IntVector no_threshold(n, 0);
    AbelianVerdict verdict;
    verdict.first = apply_sequence(eta0, seq1, stack, no_threshold).state;
    verdict.second = apply_sequence(eta0, seq2, stack, no_threshold).state;
    verdict.equal = verdict.first == verdict.second;
    return verdict;
}

struct LeastActionVerdict {
    IntVector legal_odometer;
    IntVector stabilizing_odometer;
    bool dominated = false;  // legal_odometer <= stabilizing_odometer pointwise
};

template <InstructionSource Stack>
LeastActionVerdict check_least_action(const IntVector& eta0, const ToppleSequence& legal_seq,
                                      const ToppleSequence& stabilizing_seq, Stack& stack, const IntVector& t) {
    const std::size_t n = eta0.size();
    if (!apply_sequence(eta0, legal_seq, stack, t).all_legal())
        throw NotLegal("check_least_action: first sequence contains an illegal toppling");
    if (!is_stable(apply_sequence(eta0, stabilizing_seq, stack, t).state.eta, t))
        throw NotStabilizing("check_least_action: second sequence does not reach a stable configuration");
    LeastActionVerdict verdict;
    verdict.legal_odometer = odometer(legal_seq, n);
    verdict.stabilizing_odometer = odometer(stabilizing_seq, n);
    verdict.dominated = true;
    for (std::size_t v = 0; v < n; ++v)
        if (verdict.legal_odometer[v] > verdict.stabilizing_odometer[v]) verdict.dominated = false;
    return verdict;
}

struct GreedyOutcome {
    bool stable = false;  // false: budget exhausted first
    ToppleSequence sequence;
    StackState final_state;
};

/// Topples the smallest-index legal vertex until stable or `budget` steps.
template <InstructionSource Stack>
GreedyOutcome greedy_legal_stabilize(const IntVector& eta0, Stack& stack, const IntVector& t, std::size_t budget) {
    GreedyOutcome out;
    out.final_state = StackState::start(eta0);
    auto& st = out.final_state;
    while (true) {
        Vertex pick = st.eta.size();
        for (Vertex v = 0; v < st.eta.size(); ++v)
            if (is_legal(st.eta, v, t)) {
                pick = v;
                break;
            }
        if (pick == st.eta.size()) {
            out.stable = true;
            return out;
        }
        if (out.sequence.size() >= budget) return out;
        topple_in_place(st, pick, stack);
        out.sequence.push_back(pick);
    }
}

/// Loads {vertex: [[delta over V], ...]} in the network's vertex order.
/// Vertices absent from the document get empty stacks.
inline MaterializedStack load_stack(const nlohmann::json& doc, const NetworkSpec& spec) {
    if (!doc.is_object()) throw SchemaError("stack: expected an object");
    std::vector<std::vector<IntVector>> data(spec.size());
    for (const auto& [name, jinstr] : doc.items()) {
        const auto v = spec.find_vertex(name);
        if (!v) throw ReferenceError("stack: unknown vertex '" + name + "'");
        if (!jinstr.is_array()) throw SchemaError("stack." + name + ": expected an array of instructions");
        for (const auto& jd : jinstr) {
            if (!jd.is_array() || jd.size() != spec.size())
                throw SchemaError("stack." + name + ": each instruction must list one integer per vertex");
            IntVector d(spec.size());
            for (std::size_t w = 0; w < spec.size(); ++w) d[w] = detail::as_count(jd[w], "stack." + name);
            data[*v].push_back(std::move(d));
        }
    }
    return MaterializedStack(std::move(data));
}

inline nlohmann::json emit_stack(const MaterializedStack& stack, const NetworkSpec& spec) {
    nlohmann::json doc = nlohmann::json::object();
    for (Vertex v = 0; v < stack.vertex_count(); ++v) doc[spec.vertices[v]] = stack.data()[v];
    return doc;
}

}  // namespace abnet

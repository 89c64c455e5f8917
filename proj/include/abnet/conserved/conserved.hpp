#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/dynamics/dynamics.hpp>
#include <abnet/model/network.hpp>
#include <abnet/spectral/criticality.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace abnet {

inline constexpr double kConservedTolerance = 1e-9;

/// Weights a > 0 and potentials φ with Σ_v a(v)η(v) + φ(v, q(v)) invariant.
/// Phi[v][s] = ⟨a, ξ^{v,s}⟩, constant over the support of ν^{v,s}.
struct ConservedQuantity {
    RealVector a;
    std::vector<RealVector> phi;  // phi[v][s]
    std::vector<RealVector> Phi;  // Phi[v][s]

    double max_phi() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& row : phi)
            for (double x : row) m = std::max(m, x);
        return m;
    }

    double evaluate(const IntVector& eta, const GlobalEnv& q) const {
        double total = 0.0;
        for (std::size_t v = 0; v < a.size(); ++v) total += a[v] * static_cast<double>(eta[v]) + phi[v][q[v]];
        return total;
    }
};

struct RhoNonzero {
    double rho = 0.0;
};

/// Two atoms of ν^{v,s} with different ⟨a, δ⟩.
struct NonConstantInner {
    Vertex vertex = 0;
    StateIndex state = 0;
    std::size_t first_atom = 0;
    std::size_t second_atom = 0;
    double first_value = 0.0;
    double second_value = 0.0;
};

/// A transition r → s of P_v with g(s) − g(r) ≠ Φ(v,s) under the potentials
/// propagated along a spanning tree from the reference state.
struct PotentialInfeasible {
    Vertex vertex = 0;
    StateIndex from = 0;
    StateIndex to = 0;
    double potential_difference = 0.0;  // g(to) − g(from)
    double required = 0.0;              // Φ(v, to)
};

using DetectionResult = std::variant<ConservedQuantity, RhoNonzero, NonConstantInner, PotentialInfeasible>;

inline bool found(const DetectionResult& r) { return std::holds_alternative<ConservedQuantity>(r); }

inline double inner(const RealVector& a, const IntVector& delta) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * static_cast<double>(delta[i]);
    return s;
}

/// Builds a conserved quantity from the right Perron vector, or explains why
/// none exists.
inline DetectionResult detect(const NetworkSpec& spec, const SpectralReport& report, double eps = 1e-9) {
    if (std::abs(report.rho) > eps) return RhoNonzero{report.rho};
    ConservedQuantity cq;
    cq.a = report.a;
    const std::size_t n = spec.size();
    cq.Phi.resize(n);
    cq.phi.resize(n);

    for (Vertex v = 0; v < n; ++v) {
        const std::size_t ns = spec.env[v].size();
        cq.Phi[v].resize(ns);
        for (StateIndex s = 0; s < ns; ++s) {
            const auto& atoms = spec.rules[v][s].atoms;
            const double first = inner(cq.a, atoms[0].delta);
            for (std::size_t i = 1; i < atoms.size(); ++i) {
                const double value = inner(cq.a, atoms[i].delta);
                if (std::abs(value - first) > kConservedTolerance) return NonConstantInner{v, s, 0, i, first, value};
            }
            cq.Phi[v][s] = first;
        }
    }

    for (Vertex v = 0; v < n; ++v) {
        const auto& p = spec.env[v].transition;
        const std::size_t ns = spec.env[v].size();
        std::vector<double> g(ns, 0.0);
        std::vector<char> known(ns, 0);
        std::vector<StateIndex> queue{0};
        known[0] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const StateIndex r = queue[head];
            for (StateIndex s = 0; s < ns; ++s)
                if (p(r, s) > 0.0 && !known[s]) {
                    g[s] = g[r] + cq.Phi[v][s];
                    known[s] = 1;
                    queue.push_back(s);
                }
        }
        for (StateIndex s = 0; s < ns; ++s)
            if (!known[s]) throw ReducibleChain("detect: environment of '" + spec.vertices[v] + "' is reducible");
        for (StateIndex r = 0; r < ns; ++r)
            for (StateIndex s = 0; s < ns; ++s)
                if (p(r, s) > 0.0 && std::abs(g[s] - g[r] - cq.Phi[v][s]) > kConservedTolerance)
                    return PotentialInfeasible{v, r, s, g[s] - g[r], cq.Phi[v][s]};
        cq.phi[v].resize(ns);
        for (StateIndex s = 0; s < ns; ++s) cq.phi[v][s] = 0.0 - g[s];
    }
    return cq;
}

struct ConservationCheck {
    double max_deviation = 0.0;
    double tolerance = 0.0;  // 1e-9 · (1 + |Q_0|)
    bool ok() const { return max_deviation <= tolerance; }
};

/// max_n |Q_n − Q_0| along a trajectory of configurations.
inline ConservationCheck verify_conserved(const ConservedQuantity& cq, const std::vector<Configuration>& trajectory) {
    ConservationCheck out;
    if (trajectory.empty()) return out;
    const double q0 = cq.evaluate(trajectory.front().eta, trajectory.front().q);
    out.tolerance = kConservedTolerance * (1.0 + std::abs(q0));
    for (const auto& cfg : trajectory) out.max_deviation = std::max(out.max_deviation, std::abs(cq.evaluate(cfg.eta, cfg.q) - q0));
    return out;
}

inline ConservationCheck verify_conserved(const ConservedQuantity& cq, const std::vector<Snapshot>& trajectory) {
    std::vector<Configuration> cfgs;
    cfgs.reserve(trajectory.size());
    for (const auto& s : trajectory) cfgs.push_back(s.cfg);
    return verify_conserved(cq, cfgs);
}

/// Initial state from which the legal driver never stabilizes: q0 is the
/// first global environment and eta0 = (⌈D / min a⌉₊ + 1)·1 with
/// D = Σ a·t + |V|·max φ − Σ φ(v, q0(v)), so Σ(a·eta0 + φ) ≥ Σ a·t + |V|·max φ
/// holds with slack min a.
inline std::pair<IntVector, GlobalEnv> unstable_initial_state(const ConservedQuantity& cq, const NetworkSpec& spec) {
    const std::size_t n = spec.size();
    if (cq.a.size() != n || cq.phi.size() != n) throw InvalidQuantity("unstable_initial_state: size mismatch");
    for (Vertex v = 0; v < n; ++v) {
        if (!(cq.a[v] > 0.0)) throw InvalidQuantity("unstable_initial_state: a must be entrywise positive");
        if (cq.phi[v].size() != spec.env[v].size()) throw InvalidQuantity("unstable_initial_state: phi size mismatch");
    }
    const GlobalEnv q0 = spec.first_env();
    const double min_a = *std::min_element(cq.a.begin(), cq.a.end());
    double at = 0.0, phi0 = 0.0;
    for (Vertex v = 0; v < n; ++v) {
        at += cq.a[v] * static_cast<double>(spec.threshold[v]);
        phi0 += cq.phi[v][q0[v]];
    }
    const double target = at + static_cast<double>(n) * cq.max_phi();
    const double deficit = target - phi0;
    const Count surplus = static_cast<Count>(std::max(0.0, std::ceil(deficit / min_a)));
    IntVector eta0(n, surplus + 1);
    if (!(cq.evaluate(eta0, q0) >= target)) throw InvalidQuantity("unstable_initial_state: inequality check failed");
    return {eta0, q0};
}

}  // namespace abnet

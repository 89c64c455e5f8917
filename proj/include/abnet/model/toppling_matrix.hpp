#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/matrix.hpp>
#include <abnet/model/network.hpp>
#include <abnet/spectral/primitive.hpp>
#include <abnet/spectral/stationary.hpp>

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace abnet {

/// Expected toppling matrix M (rows: toppled vertex, columns: receiving
/// vertex) with its diagonal shift α and the mass-reduction bound K.
struct ToppleMatrix {
    Matrix entries;
    double alpha = 1.0;
    Count diag_bound = 0;

    std::size_t size() const { return entries.rows(); }

    /// M + αI
    Matrix shifted() const {
        Matrix a = entries;
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += alpha;
        return a;
    }
};

/// μ^{v,s}(w) = Σ_atoms prob · delta(w)
inline RealVector expected_step(const NetworkSpec& spec, Vertex v, StateIndex s) {
    const auto& dist = spec.rule(v, s);
    RealVector mu(spec.size(), 0.0);
    for (const auto& atom : dist.atoms)
        for (Vertex w = 0; w < spec.size(); ++w) mu[w] += atom.prob * static_cast<double>(atom.delta[w]);
    return mu;
}

/// Stationary law of every vertex's environment chain, in vertex order.
inline std::vector<RealVector> environment_stationary(const NetworkSpec& spec) {
    std::vector<RealVector> out;
    out.reserve(spec.size());
    for (Vertex v = 0; v < spec.size(); ++v) {
        try {
            out.push_back(stationary_distribution(spec.env[v].transition));
        } catch (const ReducibleChain& e) {
            throw ReducibleChain("environment of vertex '" + spec.vertices[v] + "': " + e.what());
        } catch (const PeriodicChain& e) {
            throw PeriodicChain("environment of vertex '" + spec.vertices[v] + "': " + e.what());
        } catch (const NonConvergence& e) {
            throw EnvironmentError("environment of vertex '" + spec.vertices[v] + "': " + e.what());
        }
    }
    return out;
}

/// M(v,w) = Σ_s π_v(s) μ^{v,s}(w);  α = max_v(−M(v,v)) + 1.
inline ToppleMatrix toppling_matrix(const NetworkSpec& spec, const std::vector<RealVector>& pi) {
    const std::size_t n = spec.size();
    ToppleMatrix tm;
    tm.entries = Matrix(n, n);
    for (Vertex v = 0; v < n; ++v)
        for (StateIndex s = 0; s < spec.env[v].size(); ++s) {
            const auto mu = expected_step(spec, v, s);
            for (Vertex w = 0; w < n; ++w) tm.entries(v, w) += pi[v][s] * mu[w];
        }
    double worst = -tm.entries(0, 0);
    for (Vertex v = 1; v < n; ++v) worst = std::max(worst, -tm.entries(v, v));
    tm.alpha = worst + 1.0;
    tm.diag_bound = spec.max_threshold();
    return tm;
}

inline ToppleMatrix toppling_matrix(const NetworkSpec& spec) {
    return toppling_matrix(spec, environment_stationary(spec));
}

/// Result of the uniform-exponent irreducibility check on M − Diag(M).
struct IrrResult {
    std::optional<std::size_t> exponent;                      // least k, 0 when |V| = 1
    std::optional<std::pair<Vertex, Vertex>> witness;         // zero off-diagonal pair at the bound
    bool strongly_connected = false;                          // diagnostic: per-pair reachability

    bool ok() const { return exponent.has_value(); }
};

/// Least k <= (|V|−1)²+1 such that every off-diagonal entry of
/// (M − Diag(M))^k is positive, on the Boolean pattern.
inline IrrResult validate_irr(const ToppleMatrix& tm) {
    const std::size_t n = tm.size();
    IrrResult result;
    BoolPattern base(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) base.set(i, j, i != j && tm.entries(i, j) > 0.0);
    result.strongly_connected = !unreachable_pair(base).has_value();
    if (n <= 1) {
        result.exponent = 0;
        result.strongly_connected = true;
        return result;
    }
    BoolPattern power = base;
    const std::size_t bound = wielandt_bound(n);
    for (std::size_t k = 1; k <= bound; ++k) {
        if (k > 1) power = power.multiply(base);
        if (!power.first_zero(/*skip_diagonal=*/true)) {
            result.exponent = k;
            return result;
        }
    }
    result.witness = power.first_zero(true);
    return result;
}

}  // namespace abnet

#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/matrix.hpp>
#include <abnet/spectral/primitive.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace abnet {

struct PowerIterationOptions {
    double tolerance = 1e-13;
    std::size_t max_iterations = 1'000'000;
};

/// ‖πP − π‖₁
inline double stationary_residual(const Matrix& p, const std::vector<double>& pi) {
    const auto next = p.apply_left(pi);
    double r = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) r += std::abs(next[i] - pi[i]);
    return r;
}

/// Stationary law of a primitive-patterned stochastic matrix by power
/// iteration on Pᵀ from the uniform vector.
inline std::vector<double> stationary_distribution(const Matrix& p, const PowerIterationOptions& opts = {}) {
    const std::size_t n = p.rows();
    if (n == 0 || !p.square()) throw EnvironmentError("stationary_distribution: empty or non-square matrix");
    const auto prim = check_primitive(p);
    if (!prim.strongly_connected) {
        const auto w = unreachable_pair(BoolPattern::positive_entries(p));
        throw ReducibleChain("environment chain is reducible: state " + std::to_string(w->second) +
                             " is unreachable from state " + std::to_string(w->first));
    }
    if (!prim.ok()) throw PeriodicChain("environment chain is irreducible but periodic");

    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        auto next = p.apply_left(pi);
        double sum = 0.0;
        for (double x : next) sum += x;
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= sum;
            change += std::abs(next[i] - pi[i]);
        }
        pi = std::move(next);
        if (change < opts.tolerance) break;
    }
    const double residual = stationary_residual(p, pi);
    if (residual > 1e-12)
        throw NonConvergence("stationary_distribution: residual " + std::to_string(residual) +
                             " above 1e-12 after iteration cap");
    return pi;
}

}  // namespace abnet

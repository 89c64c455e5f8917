#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/matrix.hpp>
#include <abnet/spectral/primitive.hpp>
#include <abnet/spectral/stationary.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace abnet {

/// Perron–Frobenius data of a primitive nonnegative matrix.
struct PerronPair {
    double r = 0.0;
    std::vector<double> left;   // pᵀA = r pᵀ, Σp = 1
    std::vector<double> right;  // A a = r a, max a = 1
    std::size_t left_iterations = 0;
    std::size_t right_iterations = 0;
    double left_residual = 0.0;   // ‖pᵀA − r pᵀ‖∞
    double right_residual = 0.0;  // ‖A a − r a‖∞
};

namespace detail {

struct DominantVector {
    double value = 0.0;
    std::vector<double> vec;  // max entry 1
    std::size_t iterations = 0;
    double residual = 0.0;
};

inline double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double inf_residual(const Matrix& a, const std::vector<double>& x, double r) {
    const auto ax = a.apply(x);
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(ax[i] - r * x[i]));
    return res;
}

// Power iteration on A with Rayleigh-quotient stopping; x stays max-normalized.
inline DominantVector power_iterate(const Matrix& a, const PowerIterationOptions& opts) {
    const std::size_t n = a.rows();
    DominantVector out;
    std::vector<double> x(n, 1.0);
    double previous = 0.0;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        auto ax = a.apply(x);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += x[i] * ax[i];
            den += x[i] * x[i];
        }
        const double rq = num / den;
        const double scale = max_abs(ax);
        if (scale == 0.0) throw NonConvergence("power iteration collapsed to the zero vector");
        for (auto& v : ax) v /= scale;
        x = std::move(ax);
        out.iterations = it;
        if (it > 1 && std::abs(rq - previous) < opts.tolerance * std::max(1.0, std::abs(rq))) {
            // Rayleigh quotients settle before the vector does on non-normal
            // matrices, so the residual must agree as well.
            const double res = inf_residual(a, x, rq);
            if (res <= 1e-11 * std::max(1.0, std::abs(rq))) {
                out.value = rq;
                break;
            }
        }
        previous = rq;
        out.value = rq;
    }
    out.vec = std::move(x);
    out.residual = inf_residual(a, out.vec, out.value);
    return out;
}

}  // namespace detail

/// Perron root with positive left (sum 1) and right (max 1) eigenvectors.
inline PerronPair perron_eigenpair(const Matrix& a, const PowerIterationOptions& opts = {}) {
    if (!a.square() || a.rows() == 0) throw DomainError("perron_eigenpair: matrix must be square and nonempty");
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) < 0.0) throw DomainError("perron_eigenpair: matrix has a negative entry");
    if (!check_primitive(a).ok()) throw DomainError("perron_eigenpair: matrix is not primitive");

    const auto right = detail::power_iterate(a, opts);
    const auto left = detail::power_iterate(a.transposed(), opts);

    PerronPair out;
    out.r = right.value;
    out.right = right.vec;
    out.right_iterations = right.iterations;
    out.left_iterations = left.iterations;
    double sum = 0.0;
    for (double v : left.vec) sum += v;
    out.left = left.vec;
    for (auto& v : out.left) v /= sum;

    out.right_residual = detail::inf_residual(a, out.right, out.r);
    out.left_residual = detail::inf_residual(a.transposed(), out.left, out.r);
    const double bound = 1e-9 * out.r;
    if (!(out.r > 0.0) || out.right_residual > bound || out.left_residual > bound)
        throw NonConvergence("perron_eigenpair: residual above 1e-9 r after " +
                             std::to_string(opts.max_iterations) + " iterations");
    for (std::size_t i = 0; i < a.rows(); ++i)
        if (!(out.left[i] > 0.0) || !(out.right[i] > 0.0))
            throw NonConvergence("perron_eigenpair: eigenvector lost positivity");
    return out;
}

}  // namespace abnet

#pragma once

#include <abnet/model/network.hpp>
#include <abnet/model/toppling_matrix.hpp>
#include <abnet/spectral/perron.hpp>
#include <abnet/spectral/primitive.hpp>

#include <vector>

namespace abnet {

/// Spectral summary of a network: ρ = r(M+αI) − α with Perron vectors.
struct SpectralReport {
    ToppleMatrix matrix;
    std::vector<RealVector> stationary;  // π_v per vertex
    double r = 0.0;
    double rho = 0.0;
    RealVector p;  // left, Σ = 1
    RealVector a;  // right, max = 1
    std::size_t primitivity_exponent = 0;
    std::size_t left_iterations = 0;
    std::size_t right_iterations = 0;

    double alpha() const { return matrix.alpha; }
};

inline SpectralReport criticality(const NetworkSpec& spec, const PowerIterationOptions& opts = {}) {
    SpectralReport report;
    report.stationary = environment_stationary(spec);
    report.matrix = toppling_matrix(spec, report.stationary);
    const Matrix shifted = report.matrix.shifted();
    for (std::size_t i = 0; i < shifted.rows(); ++i)
        for (std::size_t j = 0; j < shifted.cols(); ++j)
            if (i != j && shifted(i, j) < 0.0)
                throw DomainError("criticality: M has a negative off-diagonal entry (MOLI fails)");
    const auto prim = check_primitive(shifted);
    if (!prim.ok()) {
        const auto [v, w] = *prim.witness;
        throw DomainError("criticality: M + alpha I is not primitive; entry (" + spec.vertices[v] + ", " +
                          spec.vertices[w] + ") of every power up to the Wielandt bound is zero");
    }
    report.primitivity_exponent = *prim.exponent;
    const auto pf = perron_eigenpair(shifted, opts);
    report.r = pf.r;
    report.rho = pf.r - report.matrix.alpha;
    report.p = pf.left;
    report.a = pf.right;
    report.left_iterations = pf.left_iterations;
    report.right_iterations = pf.right_iterations;
    return report;
}

}  // namespace abnet

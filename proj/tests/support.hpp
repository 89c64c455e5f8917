#pragma once

#include <abnet/abnet.hpp>

#include "json.hpp"

#include <cmath>
#include <string>

namespace abnet::testing {

inline std::string spec_path(const std::string& file) { return std::string(ABNET_SPEC_DIR) + "/" + file; }

inline NetworkSpec ex1() { return load_spec(spec_path("ex1_critical_walk.json")); }
inline NetworkSpec ex2() { return load_spec(spec_path("ex2_transfer.json")); }
inline NetworkSpec ex3() { return load_spec(spec_path("ex3_two_state.json")); }
inline NetworkSpec ex4() { return load_spec(spec_path("ex4_doubling.json")); }

/// Largest eigenvalue of a real 2×2 matrix with real spectrum, from the
/// characteristic polynomial.
inline double top_eigenvalue_2x2(double a, double b, double c, double d) {
    const double half_trace = 0.5 * (a + d);
    const double half_gap = 0.5 * (a - d);
    return half_trace + std::sqrt(half_gap * half_gap + b * c);
}

}  // namespace abnet::testing

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace abnet {

/// Sufficient statistics for a sample mean. Merging is associative, so
/// batches reduced in any grouping agree up to floating rounding; callers that
/// need bit-exact output merge in a fixed order.
struct MeanAccumulator {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }

    void merge(const MeanAccumulator& other) {
        n += other.n;
        sum += other.sum;
        sum_sq += other.sum_sq;
    }

    double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

    /// Unbiased sample variance.
    double variance() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v < 0.0 ? 0.0 : v;
    }

    double standard_error() const {
        return n == 0 ? std::numeric_limits<double>::infinity()
                      : std::sqrt(variance() / static_cast<double>(n));
    }
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Wilson score interval for a binomial proportion; the default z is the
/// two-sided 95% normal quantile.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // the endpoints are exact at the extremes; rounding must not lift 0
    const double lower = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double upper = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lower, upper};
}

}  // namespace abnet

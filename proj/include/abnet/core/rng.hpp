#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace abnet {

/// SplitMix64 finalizer. Used both to expand seeds and to derive stream ids.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seedable, splittable 64-bit generator (xoshiro256**).
///
/// Stream derivation is fixed and part of the reproducibility contract:
///
///     key   = splitmix64(seed) ^ splitmix64(stream ^ 0xD1B54A32D192ED03)
///     s[i]  = splitmix64(key + i * 0x9E3779B97F4A7C15),  i = 0..3
///
/// and `split(k)` yields the stream with id `splitmix64(stream) ^ k` under
/// the same master seed. Draw routines below never use <random>
/// distributions, whose output is implementation-defined.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
        const std::uint64_t key = splitmix64(seed) ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL);
        for (std::size_t i = 0; i < state_.size(); ++i)
            state_[i] = splitmix64(key + i * 0x9E3779B97F4A7C15ULL);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    RngStream split(std::uint64_t k) const { return RngStream(seed_, splitmix64(stream_) ^ k); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (rejection on the top of the range).
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = max() - (max() % n);
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    /// Index drawn from a discrete law given by (nonnegative, summing to ~1) weights.
    /// The last positive index absorbs rounding slack.
    std::size_t categorical(std::span<const double> probs) noexcept {
        const double u = uniform();
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            last = i;
            acc += probs[i];
            if (u < acc) return i;
        }
        return last;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace abnet

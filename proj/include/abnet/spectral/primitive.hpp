#pragma once

#include <abnet/core/matrix.hpp>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace abnet {

/// Zero/nonzero pattern of a square matrix, one byte per entry.
class BoolPattern {
public:
    explicit BoolPattern(std::size_t n = 0) : n_(n), bits_(n * n, 0) {}

    /// Pattern of entries strictly greater than `cutoff`.
    static BoolPattern positive_entries(const Matrix& a, double cutoff = 0.0) {
        BoolPattern p(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) p.set(i, j, a(i, j) > cutoff);
        return p;
    }

    std::size_t size() const { return n_; }
    bool get(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool b) { bits_[i * n_ + j] = b ? 1 : 0; }

    BoolPattern multiply(const BoolPattern& rhs) const {
        BoolPattern out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                if (!get(i, k)) continue;
                for (std::size_t j = 0; j < n_; ++j)
                    if (rhs.get(k, j)) out.bits_[i * n_ + j] = 1;
            }
        return out;
    }

    bool all_positive() const {
        for (char b : bits_)
            if (!b) return false;
        return true;
    }

    std::optional<std::pair<std::size_t, std::size_t>> first_zero(bool skip_diagonal = false) const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                if (skip_diagonal && i == j) continue;
                if (!get(i, j)) return std::pair{i, j};
            }
        return std::nullopt;
    }

    friend bool operator==(const BoolPattern&, const BoolPattern&) = default;

private:
    std::size_t n_;
    std::vector<char> bits_;
};

/// Wielandt's bound: a primitive n x n pattern has A^k > 0 for k = (n-1)^2 + 1.
constexpr std::size_t wielandt_bound(std::size_t n) { return n == 0 ? 0 : (n - 1) * (n - 1) + 1; }

/// Reachability closure; returns the first ordered pair (i, j), i != j, with
/// no path i -> j, or nothing when the digraph is strongly connected.
inline std::optional<std::pair<std::size_t, std::size_t>> unreachable_pair(const BoolPattern& p) {
    const std::size_t n = p.size();
    for (std::size_t src = 0; src < n; ++src) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> frontier{src};
        seen[src] = 1;
        while (!frontier.empty()) {
            const std::size_t x = frontier.back();
            frontier.pop_back();
            for (std::size_t y = 0; y < n; ++y)
                if (p.get(x, y) && !seen[y]) {
                    seen[y] = 1;
                    frontier.push_back(y);
                }
        }
        for (std::size_t dst = 0; dst < n; ++dst)
            if (!seen[dst]) return std::pair{src, dst};
    }
    return std::nullopt;
}

/// Outcome of a pattern-power search: the least exponent, or a witness pair
/// that is still zero at the largest exponent tried.
struct ExponentResult {
    std::optional<std::size_t> exponent;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    bool strongly_connected = false;

    bool ok() const { return exponent.has_value(); }
};

/// Least k <= (n-1)^2 + 1 with A^k > 0 entrywise, evaluated on the pattern of A.
inline ExponentResult check_primitive(const Matrix& a) {
    ExponentResult result;
    const BoolPattern base = BoolPattern::positive_entries(a);
    result.strongly_connected = !unreachable_pair(base).has_value();
    const std::size_t bound = wielandt_bound(base.size());
    if (base.size() == 0) {
        result.exponent = 0;
        return result;
    }
    BoolPattern power = base;
    for (std::size_t k = 1; k <= bound; ++k) {
        if (k > 1) power = power.multiply(base);
        if (power.all_positive()) {
            result.exponent = k;
            return result;
        }
    }
    result.witness = power.first_zero();
    return result;
}

}  // namespace abnet

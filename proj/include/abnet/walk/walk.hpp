#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/parallel.hpp>
#include <abnet/core/rng.hpp>
#include <abnet/core/stats.hpp>
#include <abnet/dynamics/dynamics.hpp>
#include <abnet/dynamics/sampled_stack.hpp>
#include <abnet/model/network.hpp>
#include <abnet/spectral/criticality.hpp>
#include <abnet/stack/stack.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace abnet {

/// Cell (vertex, global environment) flattened as v * |S| + encode_env(q).
using CellIndex = std::size_t;

/// Π(v, q) = p(v) · ∏_u π_u(q(u)), indexed by CellIndex.
inline std::vector<double> product_stationary_law(const NetworkSpec& spec, const SpectralReport& report) {
    const std::size_t envs = spec.global_env_count();
    std::vector<double> pi(spec.size() * envs);
    for (std::size_t code = 0; code < envs; ++code) {
        const GlobalEnv q = spec.decode_env(code);
        double env_prob = 1.0;
        for (Vertex u = 0; u < spec.size(); ++u) env_prob *= report.stationary[u][q[u]];
        for (Vertex v = 0; v < spec.size(); ++v) pi[v * envs + code] = report.p[v] * env_prob;
    }
    return pi;
}

/// The p-sampled toppling walk on a sampled stack; toppling ignores legality.
class TopplingWalk {
public:
    TopplingWalk(const NetworkSpec& spec, const RealVector& p, IntVector eta0, GlobalEnv q0, const RngStream& rng)
        : spec_(&spec),
          p_(p),
          q0_(q0),
          q_(q0),
          stack_(spec, q0, rng.split(1)),
          rng_(rng.split(0)),
          state_(StackState::start(std::move(eta0))) {
        check_configuration(spec, state_.eta, q0_);
        if (p_.size() != spec.size()) throw DomainError("toppling walk: p has the wrong length");
    }

    /// Samples w ~ p and topples it; returns w. The environment before the
    /// toppling is available as env() prior to the call.
    Vertex step() {
        const Vertex w = rng_.categorical(p_);
        topple_in_place(state_, w, stack_);
        const StateIndex s = stack_.state_after(w, static_cast<std::size_t>(state_.h[w]));
        if ((q_[w] == q0_[w]) != (s == q0_[w])) mismatched_ += (s == q0_[w]) ? -1 : 1;
        q_[w] = s;
        ++steps_;
        return w;
    }

    bool at_initial_env() const { return mismatched_ == 0; }
    const IntVector& eta() const { return state_.eta; }
    const GlobalEnv& env() const { return q_; }
    const StackState& state() const { return state_; }
    const GlobalEnv& initial_env() const { return q0_; }
    SampledStack& stack() { return stack_; }
    std::uint64_t steps() const { return steps_; }

private:
    const NetworkSpec* spec_;
    RealVector p_;
    GlobalEnv q0_;
    GlobalEnv q_;
    SampledStack stack_;
    RngStream rng_;
    StackState state_;
    std::int64_t mismatched_ = 0;
    std::uint64_t steps_ = 0;
};

/// One excursion of the environment away from (and back to) q0.
struct ExcursionRecord {
    std::uint64_t tau = 0;
    IntVector increment;
    std::map<CellIndex, std::uint64_t> visit_counts;  // (w_{n+1}, q̂_n) over the excursion
    bool below_threshold = false;  // some step left {η ≥ t, η ≠ t}
};

struct WalkOptions {
    std::uint64_t excursion_cap = 100'000'000;
    std::size_t block_size = 4096;
    std::size_t jobs = 1;
};

/// Runs one excursion of `walk`, which must sit at its initial environment.
inline ExcursionRecord next_excursion(TopplingWalk& walk, const NetworkSpec& spec, std::uint64_t cap) {
    ExcursionRecord rec;
    const IntVector start = walk.eta();
    const std::size_t envs = spec.global_env_count();
    do {
        if (rec.tau >= cap)
            throw ExcursionBudgetExceeded("toppling walk: excursion exceeded " + std::to_string(cap) + " steps");
        const std::size_t code = spec.encode_env(walk.env());
        const Vertex w = walk.step();
        rec.visit_counts[w * envs + code] += 1;
        ++rec.tau;
        if (!above_threshold_strictly_somewhere(walk.eta(), spec.threshold)) rec.below_threshold = true;
    } while (!walk.at_initial_env());
    rec.increment.resize(start.size());
    for (std::size_t v = 0; v < start.size(); ++v) rec.increment[v] = walk.eta()[v] - start[v];
    return rec;
}

/// Collects n_excursions excursion records of the toppling walk from
/// (eta0, q0). Excursions come in blocks of opts.block_size; block b is an
/// independent walk restarted at (eta0, q0) on stream rng.split(b), so the
/// records are identical for any opts.jobs.
inline std::vector<ExcursionRecord> run_walk(const NetworkSpec& spec, const SpectralReport& report,
                                             const IntVector& eta0, const GlobalEnv& q0, std::size_t n_excursions,
                                             const RngStream& rng, const WalkOptions& opts = {}) {
    if (n_excursions == 0) throw DomainError("run_walk: need at least one excursion");
    check_configuration(spec, eta0, q0);
    const std::size_t block = std::max<std::size_t>(1, opts.block_size);
    const std::size_t blocks = (n_excursions + block - 1) / block;
    std::vector<ExcursionRecord> records(n_excursions);
    parallel_for(blocks, opts.jobs, [&](std::size_t b) {
        TopplingWalk walk(spec, report.p, eta0, q0, rng.split(b));
        const std::size_t end = std::min(n_excursions, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) records[i] = next_excursion(walk, spec, opts.excursion_cap);
    });
    return records;
}

struct JointStationaryReport {
    std::vector<double> empirical;  // by CellIndex
    std::vector<double> predicted;  // Π
    double l1_to_product = 0.0;     // ‖empirical − Π‖₁
    double l1_factorization = 0.0;  // ‖empirical − (w-marginal × q(u)-marginals)‖₁
    std::uint64_t steps = 0;
};

/// Frequencies of (w_{n+1}, q̂_n) along one walk of n_steps steps.
inline JointStationaryReport empirical_joint_stationary(const NetworkSpec& spec, const SpectralReport& report,
                                                        const GlobalEnv& q0, std::uint64_t n_steps,
                                                        const RngStream& rng) {
    if (n_steps < 1000) throw DomainError("empirical_joint_stationary: need at least 1000 steps");
    const std::size_t n = spec.size();
    const std::size_t envs = spec.global_env_count();
    TopplingWalk walk(spec, report.p, IntVector(n, 0), q0, rng);
    std::vector<std::uint64_t> counts(n * envs, 0);
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        const std::size_t code = spec.encode_env(walk.env());
        const Vertex w = walk.step();
        counts[w * envs + code] += 1;
    }

    JointStationaryReport out;
    out.steps = n_steps;
    out.predicted = product_stationary_law(spec, report);
    out.empirical.resize(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c)
        out.empirical[c] = static_cast<double>(counts[c]) / static_cast<double>(n_steps);

    std::vector<double> w_marginal(n, 0.0);
    std::vector<std::vector<double>> q_marginal(n);
    for (Vertex u = 0; u < n; ++u) q_marginal[u].assign(spec.env[u].size(), 0.0);
    for (std::size_t code = 0; code < envs; ++code) {
        const GlobalEnv q = spec.decode_env(code);
        for (Vertex v = 0; v < n; ++v) {
            const double f = out.empirical[v * envs + code];
            w_marginal[v] += f;
            for (Vertex u = 0; u < n; ++u) q_marginal[u][q[u]] += f;
        }
    }
    for (std::size_t code = 0; code < envs; ++code) {
        const GlobalEnv q = spec.decode_env(code);
        double env_part = 1.0;
        for (Vertex u = 0; u < n; ++u) env_part *= q_marginal[u][q[u]];
        for (Vertex v = 0; v < n; ++v) {
            const std::size_t c = v * envs + code;
            out.l1_to_product += std::abs(out.empirical[c] - out.predicted[c]);
            out.l1_factorization += std::abs(out.empirical[c] - w_marginal[v] * env_part);
        }
    }
    return out;
}

struct CellCheck {
    Vertex vertex = 0;
    GlobalEnv env;
    double mean_visits = 0.0;
    double standard_error = 0.0;
    double expected = 0.0;  // mean_tau · Π(v, q)
    bool pass = false;
};

struct ExcursionSumsVerdict {
    double mean_tau = 0.0;
    double n_sigma = 4.0;
    std::vector<CellCheck> cells;
    bool pass = false;
};

inline double mean_tau(const std::vector<ExcursionRecord>& records) {
    MeanAccumulator acc;
    for (const auto& r : records) acc.add(static_cast<double>(r.tau));
    return acc.mean();
}

/// Per-cell comparison of mean visit counts against E[τ]·Π(v, q).
inline ExcursionSumsVerdict excursion_sums_check(const std::vector<ExcursionRecord>& records, const NetworkSpec& spec,
                                                 const SpectralReport& report, double n_sigma = 4.0) {
    if (records.empty()) throw DomainError("excursion_sums_check: no records");
    const std::size_t envs = spec.global_env_count();
    const auto pi = product_stationary_law(spec, report);
    std::vector<MeanAccumulator> acc(pi.size());
    for (const auto& r : records) {
        std::vector<double> row(pi.size(), 0.0);
        for (const auto& [cell, count] : r.visit_counts) row[cell] = static_cast<double>(count);
        for (std::size_t c = 0; c < pi.size(); ++c) acc[c].add(row[c]);
    }
    ExcursionSumsVerdict out;
    out.n_sigma = n_sigma;
    out.mean_tau = mean_tau(records);
    out.pass = true;
    for (std::size_t c = 0; c < pi.size(); ++c) {
        CellCheck cell;
        cell.vertex = c / envs;
        cell.env = spec.decode_env(c % envs);
        cell.mean_visits = acc[c].mean();
        cell.standard_error = acc[c].standard_error();
        cell.expected = out.mean_tau * pi[c];
        const double diff = std::abs(cell.mean_visits - cell.expected);
        cell.pass = cell.standard_error > 0.0 ? diff <= n_sigma * cell.standard_error
                                              : diff <= 1e-9 * (1.0 + cell.expected);
        out.pass = out.pass && cell.pass;
        out.cells.push_back(std::move(cell));
    }
    return out;
}

struct DriftReport {
    std::size_t n_excursions = 0;
    double mean_tau = 0.0;
    double mean_tau_se = 0.0;
    RealVector mean_increment;
    RealVector increment_se;
    RealVector predicted;  // mean_tau · ρ · p
    RealVector z_scores;
    double n_sigma = 3.0;

    bool within_band() const {
        for (double z : z_scores)
            if (!(std::abs(z) <= n_sigma)) return false;
        return true;
    }
};

/// Empirical E[Z₁ − Z₀] against E[τ]·ρ·p (E[τ] empirical, ρ·p exact).
inline DriftReport drift_report(const std::vector<ExcursionRecord>& records, const SpectralReport& report,
                                double n_sigma = 3.0) {
    if (records.size() < 2) throw DomainError("drift_report: need at least two records");
    const std::size_t n = report.p.size();
    MeanAccumulator tau;
    std::vector<MeanAccumulator> inc(n);
    for (const auto& r : records) {
        tau.add(static_cast<double>(r.tau));
        for (std::size_t v = 0; v < n; ++v) inc[v].add(static_cast<double>(r.increment[v]));
    }
    DriftReport out;
    out.n_excursions = records.size();
    out.n_sigma = n_sigma;
    out.mean_tau = tau.mean();
    out.mean_tau_se = tau.standard_error();
    for (std::size_t v = 0; v < n; ++v) {
        out.mean_increment.push_back(inc[v].mean());
        out.increment_se.push_back(inc[v].standard_error());
        out.predicted.push_back(out.mean_tau * report.rho * report.p[v]);
        const double diff = out.mean_increment[v] - out.predicted[v];
        double z;
        if (out.increment_se[v] > 0.0)
            z = diff / out.increment_se[v];
        else
            z = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        out.z_scores.push_back(z);
    }
    return out;
}

}  // namespace abnet

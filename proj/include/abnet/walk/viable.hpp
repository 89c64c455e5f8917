#pragma once

#include <abnet/core/errors.hpp>
#include <abnet/core/parallel.hpp>
#include <abnet/core/rng.hpp>
#include <abnet/core/stats.hpp>
#include <abnet/dynamics/dynamics.hpp>
#include <abnet/spectral/criticality.hpp>
#include <abnet/walk/walk.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace abnet {

struct ViableCandidate {
    IntVector eta;
    std::uint64_t multiplier = 0;  // c in t + c·K·1
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    std::uint64_t min_returns = 0;  // smallest j at which a success was observed

    double frequency() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

struct ViableOptions {
    std::size_t max_doublings = 10;  // c = 1, 2, 4, ..., 2^max_doublings
    double eps = 1e-9;
    std::size_t jobs = 1;
};

/// One Monte Carlo trial: does the walk from (eta, q0) reach a return time
/// with η̂ ≥ eta + 1 while staying in {η̂ ≥ t, η̂ ≠ t} throughout? Returns the
/// number of returns j at success, or 0.
inline std::uint64_t viable_trial(const NetworkSpec& spec, const SpectralReport& report, const IntVector& eta,
                                  const GlobalEnv& q0, std::uint64_t horizon, const RngStream& rng) {
    const auto& t = spec.threshold;
    if (!above_threshold_strictly_somewhere(eta, t)) return 0;
    TopplingWalk walk(spec, report.p, eta, q0, rng);
    std::uint64_t returns = 0;
    for (std::uint64_t k = 0; k < horizon; ++k) {
        walk.step();
        if (!above_threshold_strictly_somewhere(walk.eta(), t)) return 0;
        if (walk.at_initial_env()) {
            ++returns;
            bool gained = true;
            for (std::size_t v = 0; v < eta.size(); ++v)
                if (walk.eta()[v] < eta[v] + 1) gained = false;
            if (gained) return returns;
        }
    }
    return 0;
}

/// Doubling search over t + c·K·1 for a configuration that is viable with
/// positive empirical frequency. With K = 0 the offsets are c − 1, so t
/// itself is the first candidate.
inline ViableCandidate find_viable(const NetworkSpec& spec, const SpectralReport& report, const GlobalEnv& q0,
                                   const RngStream& rng, std::uint64_t horizon, std::uint64_t trials,
                                   const ViableOptions& opts = {}) {
    if (!(report.rho > opts.eps))
        throw NotSupercritical("find_viable: rho = " + std::to_string(report.rho) + " is not supercritical");
    check_configuration(spec, spec.threshold, q0);
    const Count k = spec.max_threshold();
    std::uint64_t c = 1;
    for (std::size_t round = 0; round <= opts.max_doublings; ++round, c *= 2) {
        const Count offset = k > 0 ? static_cast<Count>(c) * k : static_cast<Count>(c) - 1;
        ViableCandidate cand;
        cand.multiplier = c;
        cand.trials = trials;
        cand.eta = spec.threshold;
        for (auto& x : cand.eta) x += offset;
        std::vector<std::uint64_t> outcome(trials, 0);
        const RngStream round_rng = rng.split(round);
        parallel_for(trials, opts.jobs, [&](std::size_t i) {
            outcome[i] = viable_trial(spec, report, cand.eta, q0, horizon, round_rng.split(i));
        });
        for (auto j : outcome) {
            if (j == 0) continue;
            ++cand.successes;
            if (cand.min_returns == 0 || j < cand.min_returns) cand.min_returns = j;
        }
        if (cand.successes > 0) return cand;
    }
    throw SearchExhausted("find_viable: no candidate up to c = 2^" + std::to_string(opts.max_doublings) +
                          " showed a viable trial");
}

struct SurvivalResult {
    std::uint64_t runs = 0;
    std::uint64_t survived = 0;
    Interval ci;  // Wilson 95%

    double fraction() const { return runs == 0 ? 0.0 : static_cast<double>(survived) / runs; }
};

/// Fraction of legal-driver runs still active (not stable) at `horizon`.
/// Run i draws from rng.split(i).
inline SurvivalResult survival_experiment(const NetworkSpec& spec, const IntVector& eta0, const GlobalEnv& q0,
                                          std::uint64_t horizon, std::uint64_t runs, const RngStream& rng,
                                          std::size_t jobs = 1) {
    check_configuration(spec, eta0, q0);
    const LegalStepper stepper(spec);
    std::vector<char> alive(runs, 0);
    parallel_for(runs, jobs, [&](std::size_t i) {
        RngStream run_rng = rng.split(i);
        const auto out = run_legal(stepper, eta0, q0, RunOptions{horizon, 0}, run_rng);
        alive[i] = out.tag == RunTag::Cutoff ? 1 : 0;
    });
    SurvivalResult res;
    res.runs = runs;
    for (char a : alive) res.survived += static_cast<std::uint64_t>(a);
    res.ci = wilson_interval(res.survived, res.runs);
    return res;
}

}  // namespace abnet

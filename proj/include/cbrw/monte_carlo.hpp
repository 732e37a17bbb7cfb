#pragma once

#include <cstdint>
#include <utility>

#include "cbrw/model.hpp"
#include "cbrw/rng.hpp"

namespace cbrw {

enum class TrialOutcome { exceeded, died_out, censored };

struct SimConfig {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::uint64_t max_population = 1000000;  // live-particle cap per trial
    unsigned parallel_streams = 1;
};

struct TailEstimate {
    double estimate;
    double ci_lo;  // Wilson 95%
    double ci_hi;
    std::uint64_t trials;
    std::uint64_t censored;
};

// 95% Wilson score interval for k successes out of n trials, clamped to [0,1].
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n);

// One trial of the embedded branching skeleton at excursion granularity
// (simple walks only). Holding times are never drawn: {M > x} depends only on
// the jump/branch skeleton, which the exponential clocks merely time-stamp.
// A live particle is just a catalyst index; an excursion resolves in one
// categorical draw (return to catalyst j / exceed the level / escape). A
// non-catalyst start costs one extra draw for the initial leg. Censors at the
// SimConfig default population cap; estimate_tail applies its own cfg cap.
TrialOutcome simulate_indicator(const Model& model, long z, long x, SplitMix64& rng);

// Aggregates trials with per-trial RNG substreams: trial t is seeded by
// (seed, t), so the estimate is a pure function of (model, z, x, trials, seed)
// and in particular independent of parallel_streams and thread count.
// parallel_streams only caps the worker pool (further capped by CBRW_THREADS).
// x < z short-circuits to estimate 1 with the degenerate interval [1,1].
// Censored trials count as non-exceedances, biasing the estimate downward;
// they are reported, and all-censored is an error, not an estimate.
TailEstimate estimate_tail(const Model& model, long z, long x, const SimConfig& cfg);

// Step-level fallback: simulates every individual jump, any walk law. Used as
// the low-level oracle validating the excursion reduction, and the only
// simulation path for non-nearest-neighbor walks. A particle is removed once
// it falls to left_barrier or spends step_cap jumps; either removal makes the
// trial `censored` unless some particle exceeds the level (downward bias,
// reported via the censored count).
TrialOutcome simulate_steps(const Model& model, long z, long x, std::uint64_t step_cap,
                            long left_barrier, SplitMix64& rng);

// Trial aggregation for simulate_steps, same seeding and interval contract as
// estimate_tail.
TailEstimate estimate_tail_steps(const Model& model, long z, long x, const SimConfig& cfg,
                                 std::uint64_t step_cap, long left_barrier);

}  // namespace cbrw

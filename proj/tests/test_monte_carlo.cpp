#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "cbrw/errors.hpp"
#include "cbrw/excursion.hpp"
#include "cbrw/monte_carlo.hpp"
#include "cbrw/tail_solver.hpp"

using namespace cbrw;

namespace {

Model critical_symmetric(long start = 0) {
    return Model{WalkSpec::simple(0.5),
                 CatalystSet({{0, 0.5, 1.0, OffspringDist({{0, 0.5}, {2, 0.5}})}}), start};
}

}  // namespace

TEST_CASE("wilson_interval frozen values and clamping") {
    const auto [lo, hi] = wilson_interval(100, 1000);
    CHECK(lo == doctest::Approx(0.082909443593095704).epsilon(1e-14));
    CHECK(hi == doctest::Approx(0.12015196319534839).epsilon(1e-14));
    CHECK(wilson_interval(0, 10).first == 0.0);
    CHECK(wilson_interval(10, 10).second == 1.0);
}

TEST_CASE("no branching reduces to the single-walk exceedance law") {
    // With branch probability 0 the estimate targets p2 / (1 - p1).
    const Model m{WalkSpec::simple(0.4),
                  CatalystSet({{0, 0.0, 1.0, OffspringDist({{0, 0.5}, {2, 0.5}})}}), 0};
    SimConfig cfg;
    cfg.trials = 40000;
    cfg.seed = 20240811;
    const double frozen[3] = {2.0 / 3.0, 0.0877914951989027, 0.01156101994388842};
    const long frozen_x[3] = {0, 5, 10};
    for (int i = 0; i < 3; ++i) {
        const ExcursionProbs e = excursion_probs_single(m.walk, frozen_x[i]);
        CHECK(e.p2 / (1.0 - e.p1) == doctest::Approx(frozen[i]).epsilon(1e-13));
    }
    for (long x : {0L, 1L, 2L, 5L, 10L}) {
        CAPTURE(x);
        const ExcursionProbs e = excursion_probs_single(m.walk, x);
        const double v = e.p2 / (1.0 - e.p1);
        const double sigma = std::sqrt(v * (1.0 - v) / static_cast<double>(cfg.trials));
        const TailEstimate est = estimate_tail(m, 0, x, cfg);
        CHECK(std::abs(est.estimate - v) <= 3.0 * sigma);
        CHECK(est.censored == 0);
    }
}

TEST_CASE("estimate is a pure function of seed, not of stream count") {
    unsetenv("CBRW_THREADS");
    const Model m = critical_symmetric();
    SimConfig cfg;
    cfg.trials = 20000;
    cfg.seed = 42;
    cfg.parallel_streams = 1;
    const TailEstimate one = estimate_tail(m, 0, 5, cfg);
    cfg.parallel_streams = 4;
    const TailEstimate four = estimate_tail(m, 0, 5, cfg);
    cfg.parallel_streams = 8;
    const TailEstimate eight = estimate_tail(m, 0, 5, cfg);
    CHECK(one.estimate == four.estimate);
    CHECK(one.estimate == eight.estimate);
    CHECK(one.ci_lo == eight.ci_lo);
    CHECK(one.ci_hi == eight.ci_hi);
    CHECK(one.censored == four.censored);
    CHECK(one.censored == eight.censored);
}

TEST_CASE("excursion MC brackets the solver value") {
    const Model m = critical_symmetric();
    SimConfig cfg;
    cfg.trials = 30000;
    cfg.seed = 123;
    const TailEstimate est = estimate_tail(m, 0, 5, cfg);
    const double v = 1.0 / 3.0;  // solver value at x = 5
    const double sigma = std::sqrt(v * (1.0 - v) / static_cast<double>(cfg.trials));
    CHECK(std::abs(est.estimate - v) <= 3.5 * sigma);
    CHECK(est.censored == 0);
    CHECK(est.ci_lo <= est.estimate);
    CHECK(est.estimate <= est.ci_hi);
    CHECK(est.trials == cfg.trials);
}

TEST_CASE("a tiny population cap censors instead of silently dropping") {
    const Model m = critical_symmetric();
    SimConfig cfg;
    cfg.trials = 2000;
    cfg.seed = 9;
    cfg.max_population = 1;
    const TailEstimate est = estimate_tail(m, 0, 5, cfg);
    CHECK(est.censored > 0);
    CHECK(est.censored < est.trials);
    CHECK(est.ci_lo <= est.estimate);
    CHECK(est.estimate <= est.ci_hi);
}

TEST_CASE("all-censored is an error, not an estimate") {
    SUBCASE("step cap too small to resolve anything") {
        // No deaths and no reachable level: every trial ends in a removal.
        const Model m{WalkSpec::simple(0.5),
                      CatalystSet({{0, 0.5, 1.0, OffspringDist({{2, 1.0}})}}), 0};
        SimConfig cfg;
        cfg.trials = 50;
        cfg.seed = 3;
        cfg.max_population = 64;
        CHECK_THROWS_AS(estimate_tail_steps(m, 0, 5, cfg, 1, -100), NumericsError);
    }
    SUBCASE("population cap 1 under a ternary burst") {
        const Model m{WalkSpec::simple(0.5),
                      CatalystSet({{0, 0.9, 1.0, OffspringDist({{3, 1.0}})}}), 0};
        SimConfig cfg;
        cfg.trials = 500;
        cfg.seed = 7;
        cfg.max_population = 1;
        CHECK_THROWS_AS(estimate_tail(m, 0, 1000000, cfg), NumericsError);
    }
}

TEST_CASE("levels below the start are certain without sampling") {
    const Model m = critical_symmetric(3);
    SimConfig cfg;
    cfg.trials = 10;
    const TailEstimate est = estimate_tail(m, 3, 1, cfg);
    CHECK(est.estimate == 1.0);
    CHECK(est.ci_lo == 1.0);
    CHECK(est.ci_hi == 1.0);
    CHECK(est.censored == 0);
    SplitMix64 rng(5);
    CHECK(simulate_indicator(m, 3, 2, rng) == TrialOutcome::exceeded);
}

TEST_CASE("step-level and excursion-level estimates agree") {
    const Model m = critical_symmetric();
    SimConfig cfg;
    cfg.trials = 100000;
    cfg.seed = 2718;
    const TailEstimate exc = estimate_tail(m, 0, 3, cfg);
    cfg.seed = 31415;
    const TailEstimate stp = estimate_tail_steps(m, 0, 3, cfg, 10000000, -10000);
    const TailCurve solver = tail_curve(m, 0, {3});
    const double v = solver.values[0];
    const double sigma = std::sqrt(v * (1.0 - v) / static_cast<double>(cfg.trials));
    CHECK(std::abs(exc.estimate - stp.estimate) <= 3.0 * std::sqrt(2.0) * sigma + 1e-3);
    CHECK(std::abs(exc.estimate - v) <= 3.5 * sigma);
    CHECK(std::abs(stp.estimate - v) <= 3.5 * sigma + 1e-3);  // slack for censor bias
    CHECK(stp.censored < cfg.trials / 100);
}

TEST_CASE("simulate_steps is reproducible from the rng state") {
    const Model m = critical_symmetric();
    SplitMix64 a(77), b(77);
    for (int i = 0; i < 20; ++i) {
        CHECK(simulate_steps(m, 0, 4, 100000, -500, a) ==
              simulate_steps(m, 0, 4, 100000, -500, b));
    }
}

TEST_CASE("non-nearest-neighbor walks take the step path only") {
    const Model m{WalkSpec::general({{1, 0.5}, {-1, 0.3}, {-2, 0.2}}),
                  CatalystSet({{0, 0.5, 1.0, OffspringDist({{0, 0.5}, {2, 0.5}})}}), 0};
    SimConfig cfg;
    cfg.trials = 2000;
    cfg.seed = 11;
    const TailEstimate est = estimate_tail_steps(m, 0, 3, cfg, 100000, -300);
    CHECK(est.estimate >= 0.0);
    CHECK(est.estimate <= 1.0);
    CHECK(est.censored < est.trials);
    CHECK(est.trials == cfg.trials);
    // The excursion reduction and the exact solver both require a
    // nearest-neighbor walk.
    CHECK_THROWS_AS(estimate_tail(m, 0, 3, cfg), ConfigError);
    CHECK_THROWS_AS(tail_curve(m, 0, {3}), ConfigError);
}

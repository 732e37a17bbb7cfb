#include "doctest.h"

#include <cmath>
#include <optional>

#include "cbrw/absorption.hpp"
#include "cbrw/excursion.hpp"
#include "cbrw/walk.hpp"

using namespace cbrw;

TEST_CASE("absorption table on a tiny window") {
    const WalkSpec w = WalkSpec::simple(0.5);
    const HittingTable t = absorption_table(w, {0}, -2, 2);
    CHECK(t.prob(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.prob_right(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.prob_left(1) == doctest::Approx(0.0));
    CHECK(t.prob(-1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.prob_left(-1) == doctest::Approx(0.5).epsilon(1e-14));
    // Accessor conventions at special states.
    CHECK(t.prob(0, 0) == 1.0);
    CHECK(t.prob_left(-2) == 1.0);
    CHECK(t.prob_right(2) == 1.0);
    CHECK(t.prob_right(-5) == 0.0);
    CHECK_THROWS(t.prob(1, 3));
}

TEST_CASE("bucket absorption handles overshoot") {
    // Jumps of +2 can leap past the right edge; the bucket catches them.
    const WalkSpec w = WalkSpec::general({{2, 1.0}, {-1, 1.0}});
    const HittingTable t = absorption_table(w, {0}, -3, 2);
    CHECK(t.prob(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.prob_right(1) == doctest::Approx(0.5).epsilon(1e-14));
    // From -2: +2 lands exactly on the absorber.
    CHECK(t.prob(-2, 0) == doctest::Approx(0.5).epsilon(1e-14));
    // From -1 both routes pass through the cases above.
    CHECK(t.prob(-1, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("oracle reproduces the symmetric closed forms") {
    const WalkSpec w = WalkSpec::simple(0.5);
    for (long x : {0L, 1L, 5L, 17L}) {
        const auto [p1, p2] = excursion_oracle_single(w, x);
        const ExcursionProbs e = excursion_probs_single(w, x);
        CHECK(p1 == doctest::Approx(e.p1).epsilon(1e-9));
        CHECK(p2 == doctest::Approx(e.p2).epsilon(1e-9));
    }
}

TEST_CASE("oracle reproduces the drifted closed forms") {
    for (double p : {0.4, 0.6}) {
        const WalkSpec w = WalkSpec::simple(p);
        for (long x : {0L, 3L, 11L}) {
            const auto [p1, p2] = excursion_oracle_single(w, x);
            const ExcursionProbs e = excursion_probs_single(w, x);
            CHECK(p1 == doctest::Approx(e.p1).epsilon(1e-9));
            CHECK(p2 == doctest::Approx(e.p2).epsilon(1e-9));
        }
    }
}

TEST_CASE("oracle without a level matches the no-barrier hit matrix") {
    // Symmetric two-catalyst instance: hit probabilities 7/8 self, 1/8 across.
    const WalkSpec w = WalkSpec::simple(0.5);
    const ExcursionOracleRow row = excursion_oracle(w, {0, 4}, std::nullopt, 0);
    CHECK(row.hit[0] == doctest::Approx(7.0 / 8.0).epsilon(1e-9));
    CHECK(row.hit[1] == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
    CHECK(row.exceed == 0.0);
}

TEST_CASE("catalyst above the level is immediate exceedance") {
    const WalkSpec w = WalkSpec::simple(0.5);
    const ExcursionOracleRow row = excursion_oracle(w, {0, 4}, 1L, 1);
    CHECK(row.exceed == 1.0);
    // The row below the level still resolves; the above-level catalyst is
    // excluded from its absorbing set rather than crashing the window logic.
    const ExcursionOracleRow low = excursion_oracle(w, {0, 4}, 1L, 0);
    CHECK(low.hit[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(low.hit[1] == doctest::Approx(0.0));
    CHECK(low.exceed == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("oracle on a zero-drift non-simple walk is self-consistent") {
    // Offsets {+2, -1} with rates {1, 2}: mean step 0, genuinely multi-step.
    const WalkSpec w = WalkSpec::general({{2, 1.0}, {-1, 2.0}});
    CHECK(w.drift() == doctest::Approx(0.0));
    const ExcursionOracleRow a = excursion_oracle(w, {0}, 4L, 0, 1e-10);
    const ExcursionOracleRow b = excursion_oracle(w, {0}, 4L, 0, 1e-7);
    CHECK(a.hit[0] == doctest::Approx(b.hit[0]).epsilon(1e-6));
    CHECK(a.exceed == doctest::Approx(b.exceed).epsilon(1e-6));
    CHECK(a.hit[0] >= 0.0);
    // Zero drift means recurrence: the excursion ends at the catalyst or the
    // level, never by escape, so the split must fill the whole mass.
    CHECK(a.hit[0] + a.exceed == doctest::Approx(1.0).epsilon(1e-8));
    // Exceedance mass shrinks as the level rises.
    const ExcursionOracleRow c = excursion_oracle(w, {0}, 8L, 0, 1e-10);
    CHECK(c.exceed < a.exceed);
}

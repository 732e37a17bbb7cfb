#include "doctest.h"

#include <cmath>

#include "cbrw/errors.hpp"
#include "cbrw/excursion.hpp"
#include "cbrw/ruin.hpp"

using namespace cbrw;

TEST_CASE("two-barrier ruin split") {
    SUBCASE("symmetric is linear in the start") {
        for (long s = -3; s <= 3; ++s) {
            const RuinSplit r = ruin_exit_probs(0.5, -4, 4, s);
            CHECK(r.hit_upper == doctest::Approx((s + 4) / 8.0).epsilon(1e-15));
            CHECK(r.hit_lower + r.hit_upper == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    SUBCASE("drifted spot value") {
        // p=0.4 on (0,3) from 1: hit_upper = (rho - 1)/(rho^3 - 1), rho = q/p = 1.5.
        const RuinSplit r = ruin_exit_probs(0.4, 0, 3, 1);
        CHECK(r.hit_upper == doctest::Approx(4.0 / 19.0).epsilon(1e-14));
        CHECK(r.hit_lower == doctest::Approx(15.0 / 19.0).epsilon(1e-14));
    }
    SUBCASE("reflection symmetry") {
        const RuinSplit a = ruin_exit_probs(0.3, -5, 2, 0);
        const RuinSplit b = ruin_exit_probs(0.7, -2, 5, 0);
        CHECK(a.hit_lower == doctest::Approx(b.hit_upper).epsilon(1e-14));
        CHECK(a.hit_upper == doctest::Approx(b.hit_lower).epsilon(1e-14));
    }
    SUBCASE("wide gaps neither overflow nor collapse") {
        const RuinSplit r = ruin_exit_probs(0.4, -2000000, 2000000, 0);
        CHECK(r.hit_lower == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.hit_upper >= 0.0);
        CHECK(r.hit_upper < 1e-300);  // (p/q)^2e6 underflows gracefully
    }
    SUBCASE("start must be interior") {
        CHECK_THROWS(ruin_exit_probs(0.5, 0, 4, 0));
        CHECK_THROWS(ruin_exit_probs(0.5, 0, 4, 5));
    }
}

TEST_CASE("one-sided ruin splits") {
    SUBCASE("unbounded above") {
        CHECK(ruin_exit_probs_unbounded_above(0.5, 0, 3).hit_lower == doctest::Approx(1.0));
        // p=0.6: escape probability 1 - (q/p)^3
        const RuinSplit r = ruin_exit_probs_unbounded_above(0.6, 0, 3);
        CHECK(r.hit_lower == doctest::Approx(std::pow(2.0 / 3.0, 3)).epsilon(1e-14));
        CHECK(r.hit_upper == 0.0);
    }
    SUBCASE("unbounded below mirrors") {
        const RuinSplit r = ruin_exit_probs_unbounded_below(0.4, 5, 0);
        CHECK(r.hit_upper == doctest::Approx(std::pow(2.0 / 3.0, 5)).epsilon(1e-14));
        CHECK(r.hit_lower == 0.0);
        CHECK(ruin_exit_probs_unbounded_below(0.6, 5, 0).hit_upper == doctest::Approx(1.0));
    }
}

TEST_CASE("single-catalyst excursion split") {
    SUBCASE("symmetric closed form") {
        const WalkSpec w = WalkSpec::simple(0.5);
        for (long x : {0L, 1L, 2L, 10L, 10000L}) {
            const ExcursionProbs e = excursion_probs_single(w, x);
            CHECK(e.p1 == doctest::Approx((2.0 * x + 1.0) / (2.0 * (x + 1.0))).epsilon(1e-15));
            CHECK(e.p2 == doctest::Approx(1.0 / (2.0 * (x + 1.0))).epsilon(1e-15));
            CHECK(e.p1 + e.p2 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(e.p_escape == 0.0);
        }
        const ExcursionProbs e1 = excursion_probs_single(w, 1);
        CHECK(e1.p1 == 0.75);
        CHECK(e1.p2 == 0.25);
    }
    SUBCASE("drift-left spot values") {
        const ExcursionProbs a = excursion_probs_single(WalkSpec::simple(0.4), 1);
        CHECK(a.p1 == doctest::Approx(0.64).epsilon(1e-14));
        CHECK(a.p2 == doctest::Approx(0.16).epsilon(1e-14));
        const ExcursionProbs b = excursion_probs_single(WalkSpec::simple(0.45), 7);
        CHECK(b.p1 == doctest::Approx(0.87487234940006594).epsilon(1e-14));
        CHECK(b.p2 == doctest::Approx(0.025127650599934062).epsilon(1e-13));
    }
    SUBCASE("drift-right spot values") {
        const ExcursionProbs e = excursion_probs_single(WalkSpec::simple(0.7), 3);
        CHECK(e.p1 == doctest::Approx(0.58603448275862069).epsilon(1e-14));
        CHECK(e.p2 == doctest::Approx(0.41396551724137931).epsilon(1e-14));
    }
    SUBCASE("deep level keeps relative accuracy of the tiny p2") {
        const ExcursionProbs e = excursion_probs_single(WalkSpec::simple(0.4), 1000);
        // (q-p) t^(x+1), t = 2/3, far below any cancellation-prone route.
        const double expected = 0.2 * std::exp(1001.0 * std::log(2.0 / 3.0));
        CHECK(e.p2 == doctest::Approx(expected).epsilon(1e-10));
        CHECK(e.p1 == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(e.p_escape == doctest::Approx(0.2).epsilon(1e-13));
    }
    SUBCASE("p2 below the double range underflows to zero, not NaN") {
        const ExcursionProbs e = excursion_probs_single(WalkSpec::simple(0.4), 1000000);
        CHECK(e.p2 == 0.0);
        CHECK(e.p1 == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(e.p1 + e.p2 + e.p_escape == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("negative level is a domain error") {
        CHECK_THROWS(excursion_probs_single(WalkSpec::simple(0.5), -1));
    }
    SUBCASE("general walks are rejected") {
        CHECK_THROWS_AS(excursion_probs_single(WalkSpec::general({{2, 1.0}, {-1, 2.0}}), 3),
                        ConfigError);
    }
}

TEST_CASE("return probability") {
    CHECK(return_probability(WalkSpec::simple(0.5)) == doctest::Approx(1.0));
    CHECK(return_probability(WalkSpec::simple(0.3)) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(return_probability(WalkSpec::simple(0.7)) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("excursion matrix, two catalysts") {
    const WalkSpec w = WalkSpec::simple(0.5);

    SUBCASE("W={0,4}, x=5: interior gap and barrier both active") {
        const ExcursionMatrix em = excursion_matrix_simple(w, {0, 4}, 5);
        REQUIRE(em.n == 2);
        // Row 0: up-step reaches 4 through the (0,4) gap, down-step returns by
        // recurrence. a(0,0) = 1/2 + 1/2*3/4, a(0,1) = 1/2*1/4.
        CHECK(em.a(0, 0) == doctest::Approx(7.0 / 8.0).epsilon(1e-14));
        CHECK(em.a(0, 1) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
        CHECK(em.b[0] == doctest::Approx(0.0));
        // Row 1: up-step faces the barrier at 6, down-step the gap back to 0.
        CHECK(em.a(1, 0) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
        CHECK(em.a(1, 1) == doctest::Approx(0.5 * (5.0 - 4.0) / (5.0 - 3.0) + 3.0 / 8.0).epsilon(1e-14));
        CHECK(em.b[1] == doctest::Approx(0.5 / (5.0 - 3.0)).epsilon(1e-14));
    }

    SUBCASE("W={0,4}, x=10 matches the hand-solved split") {
        const ExcursionMatrix em = excursion_matrix_simple(w, {0, 4}, 10);
        CHECK(em.a(1, 1) == doctest::Approx(0.5 * (10.0 - 4.0) / (10.0 - 3.0) + 3.0 / 8.0).epsilon(1e-14));
        CHECK(em.b[1] == doctest::Approx(0.5 / (10.0 - 3.0)).epsilon(1e-14));
        CHECK(em.b[0] == doctest::Approx(0.0));
    }

    SUBCASE("catalyst above the level is all exceed") {
        const ExcursionMatrix em = excursion_matrix_simple(w, {0, 4}, 1);
        CHECK(em.b[1] == 1.0);
        CHECK(em.a(1, 0) == 0.0);
        CHECK(em.a(1, 1) == 0.0);
        // Row 0 sees the barrier at 2 before the catalyst at 4.
        CHECK(em.a(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
        CHECK(em.a(0, 1) == 0.0);
        CHECK(em.b[0] == doctest::Approx(0.25).epsilon(1e-14));
    }

    SUBCASE("adjacent catalyst blocks the gap") {
        const ExcursionMatrix em = excursion_matrix_simple(w, {0, 3}, 1);
        CHECK(em.b[1] == 1.0);
        CHECK(em.a(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
        CHECK(em.b[0] == doctest::Approx(0.25).epsilon(1e-14));
    }

    SUBCASE("single catalyst away from the origin translates") {
        const ExcursionMatrix em = excursion_matrix_simple(w, {3}, 8);
        const ExcursionProbs e = excursion_probs_single(w, 5);
        CHECK(em.a(0, 0) == e.p1);
        CHECK(em.b[0] == e.p2);
    }
}

#include "cbrw/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbrw/errors.hpp"
#include "cbrw/ruin.hpp"

namespace cbrw {

namespace {

void require_simple(const WalkSpec& walk) {
    if (!walk.is_simple())
        throw ConfigError("closed-form excursion probabilities require a simple walk; use the absorption oracle");
}

}  // namespace

ExcursionProbs excursion_probs_single(const WalkSpec& walk, long x) {
    require_simple(walk);
    if (x < 0) throw std::domain_error("excursion level must be nonnegative");

    const double p = walk.up_prob();
    const double q = 1.0 - p;
    double p1, p2;
    if (p == q) {
        const double xs = static_cast<double>(x);
        p1 = (2.0 * xs + 1.0) / (2.0 * (xs + 1.0));
        p2 = 1.0 / (2.0 * (xs + 1.0));
        return {x, p1, p2, 0.0};
    }
    // p2 = (q-p) / ((q/p)^(x+1) - 1), rewritten with t = min(p,q)/max(p,q) < 1.
    // p1 follows from p1 + p2 = p + min(p,q) exactly.
    const double t = std::min(p, q) / std::max(p, q);
    const double tx = std::pow(t, static_cast<double>(x + 1));
    if (p < q) {
        p2 = (q - p) * tx / (1.0 - tx);
        p1 = 2.0 * p - p2;
    } else {
        p2 = (p - q) / (1.0 - tx);
        p1 = 1.0 - p2;
    }
    const double esc = std::max(0.0, 1.0 - p1 - p2);
    return {x, p1, p2, esc};
}

ExcursionMatrix excursion_matrix_simple(const WalkSpec& walk, const std::vector<long>& positions, long x) {
    require_simple(walk);
    if (positions.empty()) throw ConfigError("at least one catalyst position is required");
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (positions[i - 1] >= positions[i])
            throw ConfigError("catalyst positions must be strictly increasing");

    const std::size_t n = positions.size();
    ExcursionMatrix em;
    em.level = x;
    em.n = n;
    em.A.assign(n * n, 0.0);
    em.b.assign(n, 0.0);

    if (n == 1 && positions[0] <= x) {
        // Single catalyst: translate so the catalyst sits at 0 and use the
        // closed forms directly, which the matrix must reproduce exactly.
        ExcursionProbs ep = excursion_probs_single(walk, x - positions[0]);
        em.A[0] = ep.p1;
        em.b[0] = ep.p2;
        return em;
    }

    const double p = walk.up_prob();
    const double q = 1.0 - p;

    for (std::size_t i = 0; i < n; ++i) {
        const long w = positions[i];
        if (w > x) {
            em.b[i] = 1.0;
            continue;
        }
        const long barrier = x + 1;

        // Up step: absorbed at the nearer of the right catalyst and the level
        // barrier. Hitting the barrier (also when the right catalyst sits at
        // x+1 or beyond) is an exceedance.
        const bool right_is_catalyst = (i + 1 < n) && (positions[i + 1] < barrier);
        const long upper = right_is_catalyst ? positions[i + 1] : barrier;
        if (w + 1 == upper) {
            (right_is_catalyst ? em.A[i * n + (i + 1)] : em.b[i]) += p;
        } else {
            RuinSplit s = ruin_exit_probs(p, w, upper, w + 1);
            em.A[i * n + i] += p * s.hit_lower;
            (right_is_catalyst ? em.A[i * n + (i + 1)] : em.b[i]) += p * s.hit_upper;
        }

        // Down step: the running maximum stays at w <= x, so only catalysts
        // matter. Without a left neighbor the return probability is the
        // one-barrier limit min(1, p/q).
        if (i > 0) {
            const long lower = positions[i - 1];
            if (w - 1 == lower) {
                em.A[i * n + (i - 1)] += q;
            } else {
                RuinSplit s = ruin_exit_probs(p, lower, w, w - 1);
                em.A[i * n + (i - 1)] += q * s.hit_lower;
                em.A[i * n + i] += q * s.hit_upper;
            }
        } else {
            em.A[i * n + i] += q * std::min(1.0, p / q);
        }
    }
    return em;
}

double return_probability(const WalkSpec& walk) {
    require_simple(walk);
    return 2.0 * std::min(walk.up_prob(), walk.down_prob());
}

}  // namespace cbrw

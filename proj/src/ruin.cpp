#include "cbrw/ruin.hpp"

#include <cmath>
#include <stdexcept>

namespace cbrw {

namespace {

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ruin: p must lie in (0,1)");
}

}  // namespace

RuinSplit ruin_exit_probs(double p, long lower, long upper, long start) {
    check_p(p);
    if (!(lower < start && start < upper))
        throw std::domain_error("ruin: start must lie strictly between the barriers");

    const double q = 1.0 - p;
    double up;
    if (p == q) {
        up = static_cast<double>(start - lower) / static_cast<double>(upper - lower);
    } else if (p > q) {
        // hit_upper = (1 - (q/p)^(start-lower)) / (1 - (q/p)^(upper-lower)), q/p < 1
        const double rho = q / p;
        up = (1.0 - std::pow(rho, static_cast<double>(start - lower))) /
             (1.0 - std::pow(rho, static_cast<double>(upper - lower)));
    } else {
        // Same formula with (q/p) > 1 rescaled by (p/q)^(upper-lower) to keep
        // every power below 1.
        const double t = p / q;
        const double tn = std::pow(t, static_cast<double>(upper - lower));
        up = (std::pow(t, static_cast<double>(upper - start)) - tn) / (1.0 - tn);
    }
    return {1.0 - up, up};
}

RuinSplit ruin_exit_probs_unbounded_above(double p, long lower, long start) {
    check_p(p);
    if (!(lower < start)) throw std::domain_error("ruin: start must lie above the lower barrier");
    const double q = 1.0 - p;
    // P(ever hit lower) = min(1, (q/p)^(start-lower)).
    double down = (p <= q) ? 1.0 : std::pow(q / p, static_cast<double>(start - lower));
    return {down, 0.0};
}

RuinSplit ruin_exit_probs_unbounded_below(double p, long upper, long start) {
    check_p(p);
    if (!(start < upper)) throw std::domain_error("ruin: start must lie below the upper barrier");
    const double q = 1.0 - p;
    double up = (p >= q) ? 1.0 : std::pow(p / q, static_cast<double>(upper - start));
    return {0.0, up};
}

}  // namespace cbrw

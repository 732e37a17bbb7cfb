#pragma once

namespace cbrw {

// Absorption split of the two-barrier ruin problem for a simple walk with
// up-probability p started strictly between the barriers.
struct RuinSplit {
    double hit_lower;
    double hit_upper;
};

// Finite barriers: the probabilities sum to 1. The symmetric case uses the
// linear formula, the asymmetric one the geometric formula rewritten in powers
// of min(p,q)/max(p,q) so it neither overflows nor cancels for wide gaps.
RuinSplit ruin_exit_probs(double p, long lower, long upper, long start);

// Upper barrier at +infinity: hit_upper is 0 and 1 - hit_lower is the escape
// probability toward +infinity (positive only when p > 1/2).
RuinSplit ruin_exit_probs_unbounded_above(double p, long lower, long start);

// Lower barrier at -infinity, mirrored contract.
RuinSplit ruin_exit_probs_unbounded_below(double p, long upper, long start);

}  // namespace cbrw

#pragma once

#include <map>
#include <utility>
#include <vector>

namespace cbrw {

// Jump law of the walk on the integer lattice and its embedded discrete chain.
// The generator is space homogeneous, so only offsets are stored. Immutable
// after construction; safe to share across threads.
class WalkSpec {
public:
    // Nearest-neighbor walk: +1 with probability p, -1 with probability 1-p.
    static WalkSpec simple(double p);

    // Finite map offset -> nonnegative rate. Requires gcd of offset magnitudes 1
    // and at least one positive and one negative offset; one-sided walks are
    // rejected (the excursion structure degenerates without returns).
    static WalkSpec general(const std::map<int, double>& rates);

    bool is_simple() const { return simple_; }
    double up_prob() const;    // p; simple only
    double down_prob() const;  // 1-p; simple only
    double total_rate() const { return total_rate_; }

    // Embedded step distribution, sorted by offset. Probabilities sum to 1 exactly.
    const std::vector<std::pair<int, double>>& step_dist() const { return pmf_; }

    double drift() const;
    int max_offset_magnitude() const;

    // True iff p == q. Only decided for simple walks; throws otherwise (the
    // recurrence criterion for general finite-support walks is out of scope).
    bool is_recurrent() const;

private:
    WalkSpec() = default;

    bool simple_ = false;
    double p_ = 0.5;
    double total_rate_ = 0.0;
    std::vector<std::pair<int, double>> pmf_;
};

}  // namespace cbrw

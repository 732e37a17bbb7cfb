#pragma once

#include <vector>

#include "cbrw/offspring.hpp"

namespace cbrw {

struct Catalyst {
    long position;
    double alpha;  // branching probability, in [0,1)
    double beta;   // holding-time rate; stored for config fidelity, never used
                   // by maximal-displacement computations (the exponential
                   // clocks only time-stamp an unchanged jump/branch skeleton)
    OffspringDist offspring;
};

class CatalystSet {
public:
    // Validates: positions strictly increasing, alpha in [0,1), beta > 0, and
    // the offspring laws are not all the deterministic unit mass at 1 (that
    // instance never changes population and has no branching content).
    explicit CatalystSet(std::vector<Catalyst> entries);

    std::size_t size() const { return entries_.size(); }
    const Catalyst& operator[](std::size_t i) const { return entries_[i]; }

    std::vector<long> positions() const;

    // Index of the catalyst at `pos`, or -1.
    long index_of(long pos) const;

private:
    std::vector<Catalyst> entries_;
};

}  // namespace cbrw

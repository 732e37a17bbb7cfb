#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cbrw/walk.hpp"

namespace cbrw {

// Absorption probabilities of the embedded chain on the window
// (left_barrier, right_barrier). Interior `absorbing` states absorb on exact
// hit (taboo semantics: jumps may leap over them); states <= left_barrier and
// >= right_barrier absorb as two buckets, which handles overshoot by jumps
// wider than 1.
class HittingTable {
public:
    double prob(long start, long target) const;  // target must be an interior absorbing state
    double prob_left(long start) const;
    double prob_right(long start) const;

private:
    friend HittingTable absorption_table(const WalkSpec&, const std::vector<long>&, long, long);

    long left_ = 0;
    long right_ = 0;
    std::vector<long> absorbing_;
    // One column per interior target, then left bucket, then right bucket.
    // Rows indexed by state - (left_ + 1) over the open window.
    std::vector<std::vector<double>> cols_;
    double lookup(long start, std::size_t col) const;
};

// Exact sparse linear solve for the table; one factorization serves all
// targets. Window sizes up to a few million states are practical.
HittingTable absorption_table(const WalkSpec& walk, const std::vector<long>& absorbing,
                              long left_barrier, long right_barrier);

// First-jump decomposition of an excursion from positions[i]: hit[j] is the
// probability of first hitting catalyst j with running maximum <= level, and
// exceed the probability of passing the level first. level == nullopt drops
// the level barrier (used for the criticality matrix).
//
// Truncation barriers are pushed out by doubling until the answers stabilize
// within tol. Plain truncation error for a zero-drift walk decays only like
// 1/B, which would need astronomical windows, so zero-drift queries are
// Richardson-extrapolated (2 f(2B) - f(B), exact for the simple walk's
// linear-in-1/B error) and the doubling test is applied to the extrapolated
// values. Drifted walks keep plain doubling; their error is geometric in B.
struct ExcursionOracleRow {
    std::vector<double> hit;
    double exceed;
};

ExcursionOracleRow excursion_oracle(const WalkSpec& walk, const std::vector<long>& positions,
                                    std::optional<long> level, std::size_t i, double tol = 1e-10);

// Single-catalyst convenience: (p1, p2) at the given level for a catalyst at 0.
std::pair<double, double> excursion_oracle_single(const WalkSpec& walk, long x, double tol = 1e-10);

}  // namespace cbrw

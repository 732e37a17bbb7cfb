#pragma once

#include <vector>

#include "cbrw/walk.hpp"

namespace cbrw {

// Outcome split of one excursion from a single catalyst at 0: p1 is the
// probability of returning with running maximum <= x, p2 of exceeding x before
// returning, p_escape the rest (never returns, never exceeds).
struct ExcursionProbs {
    long level;
    double p1;
    double p2;
    double p_escape;
};

// Closed forms for a simple walk. Symmetric: p1 = (2x+1)/(2(x+1)),
// p2 = 1/(2(x+1)), p_escape = 0. Asymmetric: geometric-barrier formulas,
// evaluated in powers of t = min(p,q)/max(p,q), which never overflows and
// keeps p2 fully accurate in relative terms down to the underflow threshold
// (below which it is exactly 0, never NaN).
ExcursionProbs excursion_probs_single(const WalkSpec& walk, long x);

// Excursion outcome split for N catalysts: a(i,j) is the probability that an
// excursion from w_i first hits w_j with running maximum <= x; b[i] that it
// exceeds x before hitting any catalyst. Remaining mass escapes. Rows whose
// catalyst sits above the level carry a(i,.) = 0, b[i] = 1: the maximum is
// already past x when the excursion starts.
struct ExcursionMatrix {
    long level = 0;
    std::size_t n = 0;
    std::vector<double> A;  // row-major n x n
    std::vector<double> b;

    double a(std::size_t i, std::size_t j) const { return A[i * n + j]; }
};

// Assembles the matrix from two-barrier ruin splits: an excursion from w_i
// first steps to w_i +- 1 and is then absorbed at the neighboring catalyst or
// at the level barrier x+1, whichever is closer. Only j in {i-1, i, i+1} can
// be hit. Exceeding x means hitting x+1: nearest-neighbor paths cannot jump
// over the barrier, and a catalyst at or above x+1 is unreachable with
// running maximum <= x.
ExcursionMatrix excursion_matrix_simple(const WalkSpec& walk, const std::vector<long>& positions, long x);

// Probability the walk ever returns to its starting site: 2 min(p,q) for a
// simple walk, i.e. 1 - r in the escape decomposition.
double return_probability(const WalkSpec& walk);

}  // namespace cbrw

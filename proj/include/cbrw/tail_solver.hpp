#pragma once

#include <vector>

#include "cbrw/catalysts.hpp"
#include "cbrw/excursion.hpp"
#include "cbrw/model.hpp"

namespace cbrw {

struct SolveResult {
    double value;
    double residual;
    long iterations;
};

// Smallest root in [0,1] of
//   s = alpha (1 - f(1-s)) + (1-alpha)(p1 s + p2).
// G(s) = rhs - s is convex with G(0) = (1-alpha) p2 >= 0 and G(1) <= 0, so the
// root is unique (or 0 when G(0) = 0). Bisection to absolute 1e-13, then a
// geometric bisection stage that resolves roots far below that scale (tails
// decay like (p/q)^(x/2) and reach 1e-18 within the verified level range), then
// at most 5 Newton polish steps.
SolveResult solve_single(long x, double alpha, const OffspringDist& f, const ExcursionProbs& exc);

struct SystemResult {
    std::vector<double> values;
    double residual;
    long iterations;
};

// Least solution in [0,1]^N of the N-catalyst system
//   s_i = alpha_i (1 - f_i(1-s_i)) + (1-alpha_i) (sum_j A[i][j] s_j + b[i]).
// The map is componentwise nondecreasing, so iterating from the zero vector
// increases to the least fixed point; Aitken extrapolation every 64 steps keeps
// the near-critical linear rate practical, and one damped Newton step polishes.
// Rows whose catalyst sits above the level are pinned at 1: the maximum
// exceeds the level at time zero there, the fixed-point equation does not
// apply.
SystemResult solve_system(long x, const CatalystSet& catalysts, const ExcursionMatrix& em);

// P_z(M > x) for a start z off the catalyst grid, composed from the ruin split
// between the neighboring catalysts (or the level barrier) and the solved
// catalyst values. x < z returns exactly 1.
double tail_from_start(long z, long x, const WalkSpec& walk, const CatalystSet& catalysts,
                       const std::vector<double>& solved);

enum class CurveSource { solver, monte_carlo, asymptotic };

struct TailCurve {
    long z = 0;
    std::vector<long> levels;
    std::vector<double> values;
    std::vector<double> residuals;   // solver source
    std::vector<long> iterations;    // solver source
    std::vector<double> stderrs;     // monte_carlo source
    CurveSource source = CurveSource::solver;
};

// Solves every level of the grid (in parallel when CBRW_THREADS allows) and
// asserts the curve is nonincreasing; a violation is a numerical failure, not
// something to clamp away.
TailCurve tail_curve(const Model& model, long z, const std::vector<long>& grid);

}  // namespace cbrw

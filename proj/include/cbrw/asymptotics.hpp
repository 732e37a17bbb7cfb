#pragma once

#include <vector>

#include "cbrw/criticality.hpp"
#include "cbrw/model.hpp"
#include "cbrw/offspring.hpp"
#include "cbrw/tail_solver.hpp"

namespace cbrw {

// Tail laws for the single-catalyst model started on the catalyst. Pure
// formula evaluators; hypothesis checking lives in make_law.
//
// critical symmetric:      sqrt((1-alpha)/(alpha sigma2)) / sqrt(x)
// subcritical symmetric:   (1-alpha) / (2 alpha (1-m) x)
// critical drift left:     sqrt(2(1-alpha)(q-p)) / sqrt(alpha sigma2) * (p/q)^((x+1)/2)
// subcritical drift left:  (1-alpha)(q-p) / (1 - 2p(1-alpha) - alpha m) * (p/q)^(x+1)
double critical_symmetric(long x, double alpha, double sigma2);
double subcritical_symmetric(long x, double alpha, double m);
double critical_drift_left(long x, double alpha, double sigma2, double p, double q);
double subcritical_drift_left(long x, double alpha, double m, double p, double q);

struct S0Result {
    double value;
    // Root sits exactly at 1 (happens iff f(0) = 0: the branching never kills,
    // and with rightward drift the population exceeds every level a.s.).
    // Flagged rather than rejected.
    bool boundary;
};

// Unique root in (0,1] of alpha(1 - f(1-s)) + (2q(1-alpha) - 1)s + (1-alpha)(p-q),
// the drift-right tail limit: P(M > x) -> s0. Bisection to 1e-13; a coarse
// sign scan asserts the concave single-crossing pattern. Refuses p <= q.
S0Result s0_root(double alpha, const OffspringDist& f, double p, double q);

// A theorem's predicted tail bound to a concrete model instance, constructible
// only when classify() agrees with the theorem's hypothesis.
struct AsymptoticLaw {
    int theorem;         // 1..4
    RegimeLabel regime;  // critical (1,3) or subcritical (2,4)
    int drift_sign;      // 0 symmetric, -1 leftward, +1 rightward (limit law)
    double alpha, m, sigma2, p, q;
    long origin;          // catalyst position; formulas take x - origin
    bool limit_constant;  // drift right: prediction is the constant s0
    double s0;

    double predict(long x) const;
};

// Validates: single catalyst, start on the catalyst, simple walk, and the
// classify() label/drift demanded by the theorem. Violations raise ConfigError
// (a refusal, not a silent answer).
AsymptoticLaw make_law(const Model& model, int theorem);

struct ConvergenceRow {
    long x;
    double solver;
    double predicted;
    double ratio;  // solver / predicted
};

std::vector<ConvergenceRow> convergence_report(const TailCurve& curve, const AsymptoticLaw& law);

}  // namespace cbrw

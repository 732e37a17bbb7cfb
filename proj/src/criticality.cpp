#include "cbrw/criticality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cbrw/absorption.hpp"
#include "cbrw/errors.hpp"
#include "cbrw/excursion.hpp"
#include "cbrw/ruin.hpp"

namespace cbrw {

const char* to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::supercritical: return "supercritical";
        case RegimeLabel::critical: return "critical";
        case RegimeLabel::subcritical: return "subcritical";
    }
    return "?";
}

namespace {

// Tridiagonal F for a simple walk: an excursion from w_i can only first-hit a
// neighboring catalyst. Gap crossings are two-barrier ruin splits; the outer
// sides contribute the one-barrier return limits min(1, p/q), min(1, q/p).
std::vector<double> taboo_hit_matrix_simple(const WalkSpec& walk, const std::vector<long>& w) {
    const std::size_t n = w.size();
    const double p = walk.up_prob();
    const double q = 1.0 - p;
    std::vector<double> F(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double self = 0.0;
        if (i + 1 < n) {
            if (w[i] + 1 == w[i + 1]) {
                F[i * n + (i + 1)] += p;
            } else {
                RuinSplit s = ruin_exit_probs(p, w[i], w[i + 1], w[i] + 1);
                self += p * s.hit_lower;
                F[i * n + (i + 1)] += p * s.hit_upper;
            }
        } else {
            self += p * std::min(1.0, q / p);
        }
        if (i > 0) {
            if (w[i] - 1 == w[i - 1]) {
                F[i * n + (i - 1)] += q;
            } else {
                RuinSplit s = ruin_exit_probs(p, w[i - 1], w[i], w[i] - 1);
                self += q * s.hit_upper;
                F[i * n + (i - 1)] += q * s.hit_lower;
            }
        } else {
            self += q * std::min(1.0, p / q);
        }
        F[i * n + i] = self;
    }
    return F;
}

}  // namespace

std::vector<double> criticality_matrix(const WalkSpec& walk, const CatalystSet& catalysts) {
    const std::size_t n = catalysts.size();
    const std::vector<long> w = catalysts.positions();

    std::vector<double> F;
    if (walk.is_simple()) {
        F = taboo_hit_matrix_simple(walk, w);
    } else {
        F.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            ExcursionOracleRow row = excursion_oracle(walk, w, std::nullopt, i);
            for (std::size_t j = 0; j < n; ++j) F[i * n + j] = row.hit[j];
        }
    }

    std::vector<double> D(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = catalysts[i].alpha;
        for (std::size_t j = 0; j < n; ++j) D[i * n + j] = (1.0 - a) * F[i * n + j];
        D[i * n + i] += a * catalysts[i].offspring.mean();
    }
    return D;
}

double perron_root(const std::vector<double>& matrix, std::size_t n) {
    if (n == 0 || matrix.size() != n * n) throw std::domain_error("perron_root: bad dimensions");
    for (double v : matrix)
        if (!(v >= 0.0)) throw std::domain_error("perron_root: matrix must be entrywise nonnegative");
    if (n == 1) return matrix[0];

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), Av(n);
    double lambda = std::numeric_limits<double>::quiet_NaN();
    const long max_iter = 100000;
    for (long it = 0; it < max_iter; ++it) {
        // Av = (D + I) v; the shift keeps periodic supports converging and
        // leaves v entrywise positive, so lambda >= 1 throughout.
        for (std::size_t i = 0; i < n; ++i) {
            double acc = v[i];
            for (std::size_t j = 0; j < n; ++j) acc += matrix[i * n + j] * v[j];
            Av[i] = acc;
        }
        double norm2 = 0.0;
        lambda = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lambda += v[i] * Av[i];  // Rayleigh quotient, v has unit norm
            norm2 += Av[i] * Av[i];
        }
        // Stop on the residual, not on Rayleigh stagnation: successive
        // quotients can agree to 1e-12 while still a few hundred ulps away
        // when the spectral gap is small.
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = Av[i] - lambda * v[i];
            res2 += r * r;
        }
        if (std::sqrt(res2) <= 1e-12 * lambda) return lambda - 1.0;
        const double norm = std::sqrt(norm2);
        for (std::size_t i = 0; i < n; ++i) v[i] = Av[i] / norm;
    }
    throw NumericsError("perron_root: power iteration did not converge within 100000 iterations (last estimate " +
                        std::to_string(lambda - 1.0) + ")");
}

Regime classify(const WalkSpec& walk, const CatalystSet& catalysts, double tol) {
    const std::vector<double> D = criticality_matrix(walk, catalysts);
    const double rho = perron_root(D, catalysts.size());
    RegimeLabel label;
    if (std::abs(rho - 1.0) <= tol)
        label = RegimeLabel::critical;
    else if (rho > 1.0)
        label = RegimeLabel::supercritical;
    else
        label = RegimeLabel::subcritical;
    return {rho, label, tol, std::abs(rho - 1.0) < 1e-6};
}

}  // namespace cbrw

#pragma once

#include <string>
#include <vector>

#include "cbrw/catalysts.hpp"
#include "cbrw/walk.hpp"

namespace cbrw {

enum class RegimeLabel { supercritical, critical, subcritical };

const char* to_string(RegimeLabel label);

struct Regime {
    double perron_root;
    RegimeLabel label;
    double tol;
    // |rho - 1| < 1e-6 but the label was still assigned: downstream theorem
    // selection should not trust the classification blindly.
    bool near_critical;
};

// D[i][j] = delta_ij alpha_i m_i + (1-alpha_i) F[i][j], where F[i][j] is the
// probability that an excursion from w_i first hits w_j (no level barrier).
// Simple walks use the closed ruin forms (F is tridiagonal); general walks go
// through the absorption oracle with adaptively widened windows, which may be
// slow but is never silently wrong. Row-major N x N.
std::vector<double> criticality_matrix(const WalkSpec& walk, const CatalystSet& catalysts);

// Dominant eigenvalue of an entrywise nonnegative matrix by power iteration on
// D + I (the shift makes periodic matrices converge without moving the
// eigenvectors), Rayleigh quotient readout, relative tolerance 1e-12, at most
// 1e5 iterations.
double perron_root(const std::vector<double>& matrix, std::size_t n);

Regime classify(const WalkSpec& walk, const CatalystSet& catalysts, double tol = 1e-9);

}  // namespace cbrw

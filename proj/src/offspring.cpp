#include "cbrw/offspring.hpp"

#include <cmath>
#include <stdexcept>

#include "cbrw/errors.hpp"

namespace cbrw {

OffspringDist::OffspringDist(const std::map<int, double>& pmf) {
    if (pmf.empty()) throw ConfigError("offspring pmf must not be empty");
    double sum = 0.0;
    for (const auto& [k, p] : pmf) {
        if (k < 0) throw ConfigError("offspring counts must be nonnegative integers");
        if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("offspring probabilities must be finite and nonnegative");
        sum += p;
        if (p == 0.0) continue;
        support_.emplace_back(k, p);
        mean_ += static_cast<double>(k) * p;
        sfm_ += static_cast<double>(k) * static_cast<double>(k - 1) * p;
        max_k_ = std::max(max_k_, k);
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("offspring probabilities must sum to 1 within 1e-12");
    if (support_.empty()) throw ConfigError("offspring pmf has no positive mass");
}

namespace {

void check_s(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("pgf argument must lie in [0,1]");
}

}  // namespace

double OffspringDist::pgf(double s) const {
    check_s(s);
    // Horner over the dense range [0, max_k].
    double acc = 0.0;
    auto it = support_.rbegin();
    for (int k = max_k_; k >= 0; --k) {
        acc *= s;
        if (it != support_.rend() && it->first == k) {
            acc += it->second;
            ++it;
        }
    }
    return acc;
}

double OffspringDist::pgf_prime(double s) const {
    check_s(s);
    double acc = 0.0;
    for (const auto& [k, p] : support_) {
        if (k >= 1) acc += static_cast<double>(k) * p * std::pow(s, k - 1);
    }
    return acc;
}

double OffspringDist::tail_pgf(double s) const {
    check_s(s);
    if (s == 0.0) return 0.0;
    // 1 - (1-s)^k = -expm1(k log1p(-s)), exact in relative terms for all s in (0,1].
    const double l = std::log1p(-s);
    double acc = 0.0;
    for (const auto& [k, p] : support_) {
        if (k == 0) continue;
        acc += p * (-std::expm1(static_cast<double>(k) * l));
    }
    return acc;
}

double OffspringDist::tail_pgf_derivative_gap(double s) const {
    check_s(s);
    if (s == 0.0) return 0.0;
    // f'(1-s) - m = sum k p_k ((1-s)^(k-1) - 1) = sum k p_k expm1((k-1) log1p(-s)).
    // k <= 1 contributes zero; skipping it also avoids 0 * log1p(-1) at s = 1.
    const double l = std::log1p(-s);
    double acc = 0.0;
    for (const auto& [k, p] : support_) {
        if (k <= 1) continue;
        acc += static_cast<double>(k) * p * std::expm1(static_cast<double>(k - 1) * l);
    }
    return acc;
}

bool OffspringDist::is_deterministic_unit() const {
    return support_.size() == 1 && support_[0].first == 1;
}

}  // namespace cbrw

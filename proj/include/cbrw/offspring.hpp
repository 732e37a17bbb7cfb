#pragma once

#include <map>
#include <vector>

namespace cbrw {

// Finite offspring law of the branching event. The generating function is
// f(s) = sum p_k s^k over the finite support.
class OffspringDist {
public:
    // Validates: keys >= 0, probabilities nonnegative, sum 1 within 1e-12.
    explicit OffspringDist(const std::map<int, double>& pmf);

    double pgf(double s) const;        // f(s); s must lie in [0,1]
    double pgf_prime(double s) const;  // f'(s)

    double mean() const { return mean_; }  // f'(1)

    // f''(1), the second factorial moment. Deliberately not called "variance";
    // the two differ by m - m^2.
    double second_factorial_moment() const { return sfm_; }

    // 1 - f(1-s), accurate for s down to the underflow threshold. The direct
    // expression loses everything below 1e-16; this one is exact in relative
    // terms, which the tail solver needs for geometric-decay levels.
    double tail_pgf(double s) const;

    // f'(1-s) - m with the same stability contract.
    double tail_pgf_derivative_gap(double s) const;

    double prob_zero() const { return support_.empty() || support_[0].first != 0 ? 0.0 : support_[0].second; }

    bool is_deterministic_unit() const;  // pmf == {1: 1}

    const std::vector<std::pair<int, double>>& support() const { return support_; }
    int max_k() const { return max_k_; }

private:
    std::vector<std::pair<int, double>> support_;  // sorted by k, zero-probability entries dropped
    double mean_ = 0.0;
    double sfm_ = 0.0;
    int max_k_ = 0;
};

}  // namespace cbrw

#include "cbrw/walk.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "cbrw/errors.hpp"

namespace cbrw {

WalkSpec WalkSpec::simple(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("simple walk requires p in (0,1)");
    WalkSpec w;
    w.simple_ = true;
    w.p_ = p;
    w.total_rate_ = 1.0;
    w.pmf_ = {{-1, 1.0 - p}, {+1, p}};
    return w;
}

namespace {

// Rates given as short decimals are lifted to integers over a common power of
// ten, so each pmf entry is a single rounding of an exact rational. Returns
// false when no scale up to 1e9 works; the caller falls back to plain division.
bool rational_scale(const std::map<int, double>& rates, std::vector<double>& scaled) {
    double scale = 1.0;
    for (int k = 0; k <= 9; ++k, scale *= 10.0) {
        scaled.clear();
        bool ok = true;
        for (const auto& [off, r] : rates) {
            (void)off;
            double v = r * scale;
            double n = std::round(v);
            if (std::abs(v - n) > 1e-9 * std::max(1.0, std::abs(v)) || n >= 9.0e15) {
                ok = false;
                break;
            }
            scaled.push_back(n);
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

WalkSpec WalkSpec::general(const std::map<int, double>& rates) {
    if (rates.empty()) throw ConfigError("general walk requires at least one offset rate");

    bool any_pos = false, any_neg = false;
    long g = 0;
    double total = 0.0;
    for (const auto& [off, r] : rates) {
        if (off == 0) throw ConfigError("offset 0 is not a jump");
        if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rates must be finite and nonnegative");
        if (r == 0.0) continue;
        any_pos = any_pos || off > 0;
        any_neg = any_neg || off < 0;
        g = std::gcd(g, std::labs(static_cast<long>(off)));
        total += r;
    }
    if (total <= 0.0) throw ConfigError("general walk requires positive total rate");
    if (!any_pos || !any_neg)
        throw ConfigError("one-sided walk rejected: need a positive and a negative offset with positive rate");
    if (g != 1) throw ConfigError("walk is reducible: gcd of offset magnitudes is not 1");

    WalkSpec w;
    w.simple_ = false;
    w.total_rate_ = total;

    std::vector<double> scaled;
    bool rational = rational_scale(rates, scaled);
    double denom = 0.0;
    if (rational) {
        std::size_t k = 0;
        double sum = 0.0;
        for (const auto& [off, r] : rates) {
            (void)off;
            (void)r;
            sum += scaled[k++];
        }
        denom = sum;
    }

    std::size_t k = 0;
    for (const auto& [off, r] : rates) {
        double num = rational ? scaled[k++] : r;
        if (num == 0.0) continue;
        w.pmf_.emplace_back(off, num / (rational ? denom : total));
    }

    // Force the pmf to sum to exactly 1; the adjustment is within rounding of
    // the normalization itself.
    for (int pass = 0; pass < 4; ++pass) {
        double sum = 0.0;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < w.pmf_.size(); ++i) {
            sum += w.pmf_[i].second;
            if (w.pmf_[i].second > w.pmf_[imax].second) imax = i;
        }
        if (sum == 1.0) break;
        w.pmf_[imax].second += 1.0 - sum;
    }

    // A {-1,+1} support is the nearest-neighbor walk however it was entered;
    // promote it so the exact excursion machinery applies.
    if (w.pmf_.size() == 2 && w.pmf_[0].first == -1 && w.pmf_[1].first == +1) {
        w.simple_ = true;
        w.p_ = w.pmf_[1].second;
    }
    return w;
}

double WalkSpec::up_prob() const {
    if (!simple_) throw std::logic_error("up_prob: walk is not simple");
    return p_;
}

double WalkSpec::down_prob() const {
    if (!simple_) throw std::logic_error("down_prob: walk is not simple");
    return 1.0 - p_;
}

double WalkSpec::drift() const {
    if (simple_) return 2.0 * p_ - 1.0;
    double d = 0.0;
    for (const auto& [off, pr] : pmf_) d += off * pr;
    return d;
}

int WalkSpec::max_offset_magnitude() const {
    if (simple_) return 1;
    int m = 1;
    for (const auto& [off, pr] : pmf_) {
        (void)pr;
        m = std::max(m, std::abs(off));
    }
    return m;
}

bool WalkSpec::is_recurrent() const {
    if (!simple_) throw std::logic_error("is_recurrent is only decided for simple walks");
    return p_ == 1.0 - p_;
}

}  // namespace cbrw

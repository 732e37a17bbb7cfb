#include "cbrw/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cbrw/errors.hpp"

namespace cbrw {

namespace {

void need(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

// t^e for t in (0,1) without underflow surprises at large e.
double pow_small(double t, double e) { return std::exp(e * std::log(t)); }

}  // namespace

double critical_symmetric(long x, double alpha, double sigma2) {
    need(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    need(sigma2 > 0.0, "second factorial moment must be positive");
    need(x >= 1, "level must be >= 1");
    return std::sqrt((1.0 - alpha) / (alpha * sigma2)) / std::sqrt(static_cast<double>(x));
}

double subcritical_symmetric(long x, double alpha, double m) {
    need(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    need(m >= 0.0 && m < 1.0, "offspring mean must lie in [0,1)");
    need(x >= 1, "level must be >= 1");
    return (1.0 - alpha) / (2.0 * alpha * (1.0 - m) * static_cast<double>(x));
}

double critical_drift_left(long x, double alpha, double sigma2, double p, double q) {
    need(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    need(sigma2 > 0.0, "second factorial moment must be positive");
    need(p > 0.0 && q > 0.0 && p < q, "requires 0 < p < q");
    need(x >= 0, "level must be >= 0");
    const double prefactor = std::sqrt(2.0 * (1.0 - alpha) * (q - p)) / std::sqrt(alpha * sigma2);
    return prefactor * pow_small(p / q, 0.5 * static_cast<double>(x + 1));
}

double subcritical_drift_left(long x, double alpha, double m, double p, double q) {
    need(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    need(p > 0.0 && q > 0.0 && p < q, "requires 0 < p < q");
    need(x >= 0, "level must be >= 0");
    const double den = 1.0 - 2.0 * p * (1.0 - alpha) - alpha * m;
    need(den > 0.0, "denominator 1 - 2p(1-alpha) - alpha m must be positive (subcriticality)");
    return (1.0 - alpha) * (q - p) / den * pow_small(p / q, static_cast<double>(x + 1));
}

S0Result s0_root(double alpha, const OffspringDist& f, double p, double q) {
    need(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
    if (!(p > q))
        throw ConfigError("s0 is defined for rightward drift only (p > q)");

    const auto h = [&](double s) {
        return alpha * f.tail_pgf(s) + (2.0 * q * (1.0 - alpha) - 1.0) * s + (1.0 - alpha) * (p - q);
    };
    // h(0) = (1-alpha)(p-q) > 0, h(1) = -alpha f(0) <= 0, h concave: one
    // downward crossing. A coarse scan guards the sign pattern.
    int changes = 0;
    double prev = h(0.0);
    for (int i = 1; i <= 1000; ++i) {
        const double cur = h(static_cast<double>(i) / 1000.0);
        if ((prev > 0.0) != (cur > 0.0)) ++changes;
        prev = cur;
    }
    if (changes > 1)
        throw NumericsError("s0 equation changes sign more than once; concavity violated");

    if (h(1.0) >= 0.0) return {1.0, true};  // f(0) = 0: mass never dies, limit is 1

    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), false};
}

double AsymptoticLaw::predict(long x) const {
    if (limit_constant) return s0;
    const long y = x - origin;
    switch (theorem) {
        case 1: return critical_symmetric(y, alpha, sigma2);
        case 2: return subcritical_symmetric(y, alpha, m);
        case 3: return critical_drift_left(y, alpha, sigma2, p, q);
        case 4: return subcritical_drift_left(y, alpha, m, p, q);
        default: throw std::logic_error("theorem out of range");
    }
}

AsymptoticLaw make_law(const Model& model, int theorem) {
    if (theorem < 1 || theorem > 4) throw ConfigError("theorem must be 1, 2, 3, or 4");
    if (model.catalysts.size() != 1)
        throw ConfigError("theorem asymptotics cover the single-catalyst model");
    if (!model.walk.is_simple())
        throw ConfigError("theorem asymptotics cover the nearest-neighbor walk");
    const Catalyst& cat = model.catalysts[0];
    if (model.start != cat.position)
        throw ConfigError("theorem asymptotics require the start on the catalyst");
    if (!(cat.alpha > 0.0))
        throw ConfigError("theorem asymptotics require a branching catalyst (alpha > 0)");

    const double p = model.walk.up_prob();
    const double q = model.walk.down_prob();
    const bool symmetric = model.walk.is_recurrent();
    const RegimeLabel want =
        theorem == 1 || theorem == 3 ? RegimeLabel::critical : RegimeLabel::subcritical;

    const Regime regime = classify(model.walk, model.catalysts);
    if (regime.label != want)
        throw ConfigError(std::string("instance classifies as ") + to_string(regime.label) +
                          ", theorem " + std::to_string(theorem) + " assumes " + to_string(want));
    if ((theorem == 1 || theorem == 2) != symmetric)
        throw ConfigError(symmetric
                              ? "symmetric walk: theorems 3 and 4 assume drift"
                              : "drifted walk: theorems 1 and 2 assume the symmetric walk");

    AsymptoticLaw law;
    law.theorem = theorem;
    law.regime = want;
    law.drift_sign = symmetric ? 0 : (p < q ? -1 : 1);
    law.alpha = cat.alpha;
    law.m = cat.offspring.mean();
    law.sigma2 = cat.offspring.second_factorial_moment();
    law.p = p;
    law.q = q;
    law.origin = cat.position;
    law.limit_constant = law.drift_sign > 0;
    law.s0 = 0.0;
    if (law.limit_constant) law.s0 = s0_root(law.alpha, cat.offspring, p, q).value;
    return law;
}

std::vector<ConvergenceRow> convergence_report(const TailCurve& curve, const AsymptoticLaw& law) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(curve.levels.size());
    for (std::size_t i = 0; i < curve.levels.size(); ++i) {
        ConvergenceRow row;
        row.x = curve.levels[i];
        row.solver = curve.values[i];
        row.predicted = law.predict(row.x);
        row.ratio = row.solver / row.predicted;
        if (!std::isfinite(row.ratio))
            throw NumericsError("non-finite solver/predicted ratio at x=" + std::to_string(row.x));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cbrw

#include "cbrw/tail_solver.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cbrw/errors.hpp"
#include "cbrw/ruin.hpp"

namespace cbrw {

namespace {

// Curvature part of the fixed-point gap:
//   R(s) = (1 - f(1-s)) - m s = -sum_k p_k sum_{j>=2} C(k,j) (-s)^j,
// so R(0) = R'(0) = 0 and R(s) ~ -(sigma2/2) s^2 near 0. The direct form loses
// all digits once s is a few ulps (1 - f(1-s) collapses onto m s); the explicit
// tail of the binomial series keeps full relative accuracy there. The series is
// alternating, so it is only used where it is strongly damped.
double curvature(const OffspringDist& f, double s) {
    if (s * f.max_k() < 0.01) {
        double acc = 0.0;
        for (const auto& [k, pk] : f.support()) {
            if (k < 2) continue;
            double term = 0.5 * k * (k - 1) * s * s;  // C(k,2) (-s)^2
            double inner = term;
            for (int j = 2; j < k; ++j) {
                term *= -s * static_cast<double>(k - j) / static_cast<double>(j + 1);
                inner += term;
                if (std::abs(term) <= 1e-18 * std::abs(inner)) break;
            }
            acc += pk * inner;
        }
        return -acc;
    }
    return f.tail_pgf(s) - f.mean() * s;
}

// Fixed-point gap G(s) = alpha (1 - f(1-s)) + (1-alpha)(p1 s + p2) - s,
// regrouped as alpha R(s) + B s + (1-alpha) p2 (1-s) with
// B = alpha m + (1-alpha)(p1 + p2) - 1. B is the linear coefficient net of the
// p2 endpoint term; for critical instances it cancels to 0 exactly in floats,
// which is what lets roots at the 1e-18 scale come out with full relative
// accuracy.
struct GapFn {
    double alpha;
    const OffspringDist* f;
    double p1, p2;
    double linear;  // B above

    explicit GapFn(double a, const OffspringDist& fd, const ExcursionProbs& exc)
        : alpha(a), f(&fd), p1(exc.p1), p2(exc.p2) {
        linear = alpha * fd.mean() + (1.0 - alpha) * (p1 + p2) - 1.0;
    }

    double value(double s) const {
        return alpha * curvature(*f, s) + linear * s + (1.0 - alpha) * p2 * (1.0 - s);
    }
    double derivative(double s) const {
        return alpha * f->tail_pgf_derivative_gap(s) + linear - (1.0 - alpha) * p2;
    }
};

}  // namespace

SolveResult solve_single(long x, double alpha, const OffspringDist& f, const ExcursionProbs& exc) {
    (void)x;  // the level is baked into exc; kept in the signature for call-site clarity
    const GapFn g(alpha, f, exc);

    const double g0 = (1.0 - alpha) * exc.p2;
    if (g0 == 0.0) return {0.0, 0.0, 0};
    const double g1 = g.value(1.0);
    if (g1 > 1e-12)
        throw NumericsError("fixed-point gap positive at s=1 (" + std::to_string(g1) +
                            "): no root in [0,1], inputs are inconsistent");

    long iters = 0;
    double lo = 0.0, hi = 1.0;  // G(lo) > 0 >= G(hi)
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (g.value(mid) > 0.0 ? lo : hi) = mid;
        ++iters;
    }

    // The absolute bracket says nothing once the root sits many orders of
    // magnitude below 1e-13 (drift-left tails reach 1e-18 inside the verified
    // range). Bisect the exponent as well, down to relative width 1e-15.
    double glo = lo == 0.0 ? std::numeric_limits<double>::denorm_min() : lo;
    while (hi - glo > 1e-15 * hi) {
        const double mid = std::sqrt(glo) * std::sqrt(hi);
        if (mid <= glo || mid >= hi) break;
        (g.value(mid) > 0.0 ? glo : hi) = mid;
        ++iters;
    }

    double s = hi;
    for (int i = 0; i < 5; ++i) {
        const double gv = g.value(s);
        (gv > 0.0 ? glo : hi) = s;  // s was inside the bracket, so this tightens it
        const double gp = g.derivative(s);
        if (gp == 0.0) break;
        double next = s - gv / gp;
        if (!(next > glo && next < hi)) next = 0.5 * (glo + hi);
        ++iters;
        if (next == s) break;
        s = next;
    }

    return {s, g.value(s), iters};
}

namespace {

struct SystemMap {
    const CatalystSet* cats;
    const ExcursionMatrix* em;
    std::vector<char> fixed;  // catalyst above the level: value pinned at 1

    SystemMap(long x, const CatalystSet& catalysts, const ExcursionMatrix& em_)
        : cats(&catalysts), em(&em_) {
        const std::size_t n = catalysts.size();
        if (em_.n != n) throw std::invalid_argument("excursion matrix dimension mismatch");
        fixed.resize(n);
        for (std::size_t i = 0; i < n; ++i) fixed[i] = catalysts[i].position > x ? 1 : 0;
    }

    void apply(const std::vector<double>& s, std::vector<double>& out) const {
        const std::size_t n = fixed.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (fixed[i]) {
                out[i] = 1.0;
                continue;
            }
            const Catalyst& c = (*cats)[i];
            double lin = em->b[i];
            for (std::size_t j = 0; j < n; ++j) lin += em->a(i, j) * s[j];
            out[i] = c.alpha * c.offspring.tail_pgf(s[i]) + (1.0 - c.alpha) * lin;
        }
    }

    double residual(const std::vector<double>& s) const {
        std::vector<double> im(s.size());
        apply(s, im);
        double r = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) r = std::max(r, std::abs(im[i] - s[i]));
        return r;
    }
};

}  // namespace

SystemResult solve_system(long x, const CatalystSet& catalysts, const ExcursionMatrix& em) {
    const std::size_t n = catalysts.size();
    const SystemMap map(x, catalysts, em);

    // Monotone iteration from the bottom element (0 on free rows, 1 on pinned
    // rows). The map is componentwise nondecreasing, so the iterates increase
    // to the least fixed point.
    std::vector<double> s(n, 0.0), next(n, 0.0), prev1(n), prev2(n);
    for (std::size_t i = 0; i < n; ++i)
        if (map.fixed[i]) s[i] = 1.0;
    long iters = 0;
    const long cap = 1000000;
    bool have_hist = false;
    while (iters < cap) {
        prev2 = prev1;
        prev1 = s;
        map.apply(s, next);
        std::swap(s, next);
        ++iters;
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(s[i] >= 0.0 && s[i] <= 1.0))
                throw NumericsError("system iterate left [0,1]^N at row " + std::to_string(i));
            change = std::max(change, std::abs(s[i] - prev1[i]));
        }
        if (change < 1e-13) break;
        if (iters % 64 == 0 && have_hist) {
            // Componentwise Aitken: collapse the geometric tail of a linear
            // rate. Kept only if the jump stays in the cube and below the
            // fixed point (map(s*) >= s* keeps the monotone scheme sound).
            std::vector<double> acc(n);
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i) {
                const double d1 = prev1[i] - prev2[i];
                const double d2 = s[i] - prev1[i];
                const double den = d2 - d1;
                acc[i] = den == 0.0 ? s[i] : s[i] - d2 * d2 / den;
                ok = std::isfinite(acc[i]) && acc[i] >= 0.0 && acc[i] <= 1.0;
            }
            if (ok) {
                map.apply(acc, next);
                bool below = true;
                for (std::size_t i = 0; i < n; ++i)
                    if (next[i] < acc[i]) {
                        below = false;
                        break;
                    }
                if (below) s = acc;
            }
        }
        have_hist = true;
    }

    // One damped Newton step on F(s) = map(s) - s, free rows only. The
    // monotone phase already has the right digits' worth of bracket; Newton
    // squares the remaining error so the N=1 path agrees with solve_single to
    // machine precision.
    std::vector<std::size_t> free_rows;
    for (std::size_t i = 0; i < n; ++i)
        if (!map.fixed[i]) free_rows.push_back(i);
    if (!free_rows.empty()) {
        const std::size_t m = free_rows.size();
        Eigen::MatrixXd J(m, m);
        Eigen::VectorXd rhs(m);
        std::vector<double> im(n);
        map.apply(s, im);
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t i = free_rows[a];
            const Catalyst& c = catalysts[i];
            rhs(a) = -(im[i] - s[i]);
            for (std::size_t b = 0; b < m; ++b) {
                const std::size_t j = free_rows[b];
                double d = (1.0 - c.alpha) * em.a(i, j);
                if (i == j) d += c.alpha * c.offspring.pgf_prime(1.0 - s[i]) - 1.0;
                J(a, b) = d;
            }
        }
        Eigen::VectorXd step = J.fullPivLu().solve(rhs);
        if (step.allFinite()) {
            const double base = map.residual(s);
            for (double damp = 1.0; damp >= 1.0 / 16.0; damp *= 0.5) {
                std::vector<double> cand = s;
                bool in_cube = true;
                for (std::size_t a = 0; a < m; ++a) {
                    cand[free_rows[a]] += damp * step(a);
                    if (!(cand[free_rows[a]] >= 0.0 && cand[free_rows[a]] <= 1.0)) in_cube = false;
                }
                if (!in_cube) continue;
                if (map.residual(cand) <= base) {
                    s = cand;
                    ++iters;
                    break;
                }
            }
        }
    }

    const double res = map.residual(s);
    if (res > 1e-10)
        throw NumericsError("catalyst system did not converge: residual " + std::to_string(res) +
                            " after " + std::to_string(iters) + " iterations");
    return {s, res, iters};
}

double tail_from_start(long z, long x, const WalkSpec& walk, const CatalystSet& catalysts,
                       const std::vector<double>& solved) {
    if (x < z) return 1.0;
    const long idx = catalysts.index_of(z);
    if (idx >= 0) return solved[static_cast<std::size_t>(idx)];
    if (!walk.is_simple())
        throw ConfigError("exact tail computation requires the nearest-neighbor walk");
    if (solved.size() != catalysts.size()) throw std::invalid_argument("solved vector size mismatch");

    const std::vector<long> pos = catalysts.positions();
    long left = -1, right = -1;  // catalyst indices bracketing z
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (pos[i] < z) left = static_cast<long>(i);
        if (pos[i] > z && right < 0) right = static_cast<long>(i);
    }

    // Nearest-neighbor steps cannot jump a site, so the first event out of z is
    // absorption at the nearest catalyst on either side or at the level
    // barrier x+1, whichever is closer. Hitting x+1 makes M > x outright.
    const long barrier = x + 1;
    const long upper = right >= 0 && pos[right] < barrier ? pos[right] : barrier;
    const double up_value = upper == barrier ? 1.0 : solved[static_cast<std::size_t>(right)];
    const double p = walk.up_prob();

    if (left >= 0) {
        const RuinSplit rs = ruin_exit_probs(p, pos[left], upper, z);
        return rs.hit_lower * solved[static_cast<std::size_t>(left)] + rs.hit_upper * up_value;
    }
    const RuinSplit rs = ruin_exit_probs_unbounded_below(p, upper, z);
    return rs.hit_upper * up_value;
}

namespace {

unsigned thread_budget(std::size_t work_items) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CBRW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return std::min<unsigned>(hw, static_cast<unsigned>(work_items));
}

}  // namespace

TailCurve tail_curve(const Model& model, long z, const std::vector<long>& grid) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (grid[i + 1] <= grid[i]) throw std::invalid_argument("level grid must be strictly increasing");
    if (!model.walk.is_simple())
        throw ConfigError("exact tail computation requires the nearest-neighbor walk");

    TailCurve curve;
    curve.z = z;
    curve.levels = grid;
    curve.values.assign(grid.size(), 0.0);
    curve.residuals.assign(grid.size(), 0.0);
    curve.iterations.assign(grid.size(), 0);
    curve.source = CurveSource::solver;

    const std::vector<long> pos = model.catalysts.positions();
    auto solve_level = [&](std::size_t gi) {
        const long x = grid[gi];
        if (x < z) {
            curve.values[gi] = 1.0;
            return;
        }
        std::vector<double> solved;
        double residual = 0.0;
        long iterations = 0;
        if (model.catalysts.size() == 1) {
            const long w = pos[0];
            if (w > x) {
                solved.assign(1, 1.0);
            } else {
                const ExcursionProbs exc = excursion_probs_single(model.walk, x - w);
                const SolveResult r = solve_single(x - w, model.catalysts[0].alpha,
                                                   model.catalysts[0].offspring, exc);
                solved.assign(1, r.value);
                residual = r.residual;
                iterations = r.iterations;
            }
        } else {
            const ExcursionMatrix em = excursion_matrix_simple(model.walk, pos, x);
            SystemResult r = solve_system(x, model.catalysts, em);
            solved = std::move(r.values);
            residual = r.residual;
            iterations = r.iterations;
        }
        curve.values[gi] = tail_from_start(z, x, model.walk, model.catalysts, solved);
        curve.residuals[gi] = residual;
        curve.iterations[gi] = iterations;
    };

    const unsigned threads = thread_budget(grid.size());
    if (threads <= 1) {
        for (std::size_t gi = 0; gi < grid.size(); ++gi) solve_level(gi);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr first_error;
        std::mutex error_mu;
        auto worker = [&] {
            for (;;) {
                const std::size_t gi = cursor.fetch_add(1);
                if (gi >= grid.size()) return;
                try {
                    solve_level(gi);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // P(M > x) is nonincreasing in x by inclusion; a violation beyond noise is
    // a solver failure and must surface, not be clamped away.
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (curve.values[i + 1] > curve.values[i] + 1e-12)
            throw NumericsError("tail curve increases at level x=" + std::to_string(grid[i + 1]));
    }
    return curve;
}

}  // namespace cbrw

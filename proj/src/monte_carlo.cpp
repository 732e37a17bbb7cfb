#include "cbrw/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "cbrw/errors.hpp"
#include "cbrw/excursion.hpp"
#include "cbrw/ruin.hpp"

namespace cbrw {

namespace {

struct OffspringCdf {
    std::vector<std::pair<int, double>> cumulative;  // (count, cdf), last cdf treated as 1

    explicit OffspringCdf(const OffspringDist& f) {
        double acc = 0.0;
        for (const auto& [k, p] : f.support()) {
            acc += p;
            cumulative.emplace_back(k, acc);
        }
    }

    int draw(double u) const {
        for (const auto& [k, c] : cumulative)
            if (u < c) return k;
        return cumulative.back().first;  // u fell into the <=1e-12 normalization slack
    }
};

// Excursion outcome per catalyst: cdf over (return to catalyst 0..n-1, exceed);
// mass beyond the last entry escapes.
struct ExcursionCdf {
    std::vector<double> cdf;  // n+1 entries

    ExcursionCdf() = default;
    ExcursionCdf(const ExcursionMatrix& em, std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < em.n; ++j) {
            acc += em.a(i, j);
            cdf.push_back(acc);
        }
        acc += em.b[i];
        cdf.push_back(acc);
    }

    // Returns the hit catalyst index, n for exceed, -1 for escape.
    long draw(double u) const {
        for (std::size_t j = 0; j < cdf.size(); ++j)
            if (u < cdf[j]) return static_cast<long>(j);
        return -1;
    }
};

// The initial leg from a non-catalyst start: one categorical draw over
// (left catalyst, right catalyst-or-exceed, escape), composed from the same
// ruin splits the exact reduction uses.
struct InitialLeg {
    long left_index = -1;   // -1: no catalyst below z (escape to -inf possible)
    long right_index = -1;  // -1: the upper absorber is the level barrier
    double p_left = 0.0;
    double p_up = 0.0;  // hits right_index if >= 0, else exceeds

    InitialLeg(const Model& model, long z, long x) {
        const std::vector<long> pos = model.catalysts.positions();
        for (std::size_t i = 0; i < pos.size(); ++i) {
            if (pos[i] < z) left_index = static_cast<long>(i);
            if (pos[i] > z && right_index < 0) right_index = static_cast<long>(i);
        }
        const long barrier = x + 1;
        long upper = barrier;
        if (right_index >= 0 && pos[right_index] < barrier) {
            upper = pos[right_index];
        } else {
            right_index = -1;
        }
        const double p = model.walk.up_prob();
        if (left_index >= 0) {
            const RuinSplit rs = ruin_exit_probs(p, pos[left_index], upper, z);
            p_left = rs.hit_lower;
            p_up = rs.hit_upper;
        } else {
            p_up = ruin_exit_probs_unbounded_below(p, upper, z).hit_upper;
        }
    }
};

struct SkeletonTables {
    std::size_t n;
    std::vector<double> alpha;
    std::vector<OffspringCdf> offspring;
    std::vector<ExcursionCdf> excursion;

    SkeletonTables(const Model& model, long x) : n(model.catalysts.size()) {
        if (!model.walk.is_simple())
            throw ConfigError("excursion-level simulation requires the nearest-neighbor walk");
        const ExcursionMatrix em = excursion_matrix_simple(model.walk, model.catalysts.positions(), x);
        for (std::size_t i = 0; i < n; ++i) {
            alpha.push_back(model.catalysts[i].alpha);
            offspring.emplace_back(model.catalysts[i].offspring);
            excursion.emplace_back(em, i);
        }
    }
};

TrialOutcome run_skeleton_trial(const SkeletonTables& tables, const InitialLeg* initial,
                                long start_index, std::uint64_t max_population, SplitMix64& rng) {
    // LIFO stack of live particles; a particle is the index of the catalyst it
    // sits on. Positions between catalysts never exist at this granularity.
    std::vector<std::int32_t> stack;
    if (initial) {
        const double u = rng.next_double();
        if (u < initial->p_left) {
            stack.push_back(static_cast<std::int32_t>(initial->left_index));
        } else if (u < initial->p_left + initial->p_up) {
            if (initial->right_index < 0) return TrialOutcome::exceeded;
            stack.push_back(static_cast<std::int32_t>(initial->right_index));
        } else {
            return TrialOutcome::died_out;  // escaped without touching a catalyst
        }
    } else {
        stack.push_back(static_cast<std::int32_t>(start_index));
    }

    while (!stack.empty()) {
        const std::int32_t i = stack.back();
        stack.pop_back();
        if (rng.next_double() < tables.alpha[i]) {
            const int kids = tables.offspring[i].draw(rng.next_double());
            if (stack.size() + static_cast<std::size_t>(kids) > max_population)
                return TrialOutcome::censored;
            for (int c = 0; c < kids; ++c) stack.push_back(i);
        } else {
            const long dest = tables.excursion[i].draw(rng.next_double());
            if (dest == static_cast<long>(tables.n)) return TrialOutcome::exceeded;
            if (dest >= 0) stack.push_back(static_cast<std::int32_t>(dest));
        }
    }
    return TrialOutcome::died_out;
}

unsigned worker_budget(unsigned streams, std::uint64_t trials) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CBRW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    unsigned w = std::min(std::max(streams, 1u), hw);
    if (trials < 4096) w = 1;  // not worth spinning threads up
    return w;
}

TailEstimate wilson_estimate(std::uint64_t exceeded, std::uint64_t censored, std::uint64_t trials) {
    if (censored == trials)
        throw NumericsError("all trials censored; raise max_population (or the step cap)");
    const auto [lo, hi] = wilson_interval(exceeded, trials);
    return {static_cast<double>(exceeded) / static_cast<double>(trials), lo, hi, trials, censored};
}

// Shared trial loop: per-trial substreams, worker pool, integer aggregation.
template <typename Trial>
TailEstimate aggregate_trials(const SimConfig& cfg, Trial&& trial) {
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.max_population < 1) throw ConfigError("max_population must be >= 1");

    std::atomic<std::uint64_t> cursor{0};
    std::atomic<std::uint64_t> exceeded{0}, censored{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        std::uint64_t local_exc = 0, local_cen = 0;
        try {
            for (;;) {
                const std::uint64_t begin = cursor.fetch_add(1024);
                if (begin >= cfg.trials || stop.load(std::memory_order_relaxed)) break;
                const std::uint64_t end = std::min(begin + 1024, cfg.trials);
                for (std::uint64_t t = begin; t < end; ++t) {
                    SplitMix64 rng = trial_stream(cfg.seed, t);
                    switch (trial(rng)) {
                        case TrialOutcome::exceeded: ++local_exc; break;
                        case TrialOutcome::censored: ++local_cen; break;
                        case TrialOutcome::died_out: break;
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            stop.store(true, std::memory_order_relaxed);
        }
        exceeded.fetch_add(local_exc);
        censored.fetch_add(local_cen);
    };

    const unsigned workers = worker_budget(cfg.parallel_streams, cfg.trials);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return wilson_estimate(exceeded.load(), censored.load(), cfg.trials);
}

}  // namespace

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n) {
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double nn = static_cast<double>(n);
    const double k = static_cast<double>(successes);
    const double center = (k + z * z / 2.0) / (nn + z * z);
    const double half = z * std::sqrt(k * (nn - k) / nn + z * z / 4.0) / (nn + z * z);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TrialOutcome simulate_indicator(const Model& model, long z, long x, SplitMix64& rng) {
    if (x < z) return TrialOutcome::exceeded;
    const SkeletonTables tables(model, x);
    const long start_index = model.catalysts.index_of(z);
    if (start_index >= 0) return run_skeleton_trial(tables, nullptr, start_index, SimConfig{}.max_population, rng);
    const InitialLeg initial(model, z, x);
    return run_skeleton_trial(tables, &initial, 0, SimConfig{}.max_population, rng);
}

TailEstimate estimate_tail(const Model& model, long z, long x, const SimConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (x < z) return {1.0, 1.0, 1.0, cfg.trials, 0};

    const SkeletonTables tables(model, x);
    const long start_index = model.catalysts.index_of(z);
    if (start_index >= 0) {
        return aggregate_trials(cfg, [&](SplitMix64& rng) {
            return run_skeleton_trial(tables, nullptr, start_index, cfg.max_population, rng);
        });
    }
    const InitialLeg initial(model, z, x);
    return aggregate_trials(cfg, [&](SplitMix64& rng) {
        return run_skeleton_trial(tables, &initial, 0, cfg.max_population, rng);
    });
}

namespace {

struct StepTables {
    bool simple;
    double p = 0.5;
    std::vector<std::pair<int, double>> step_cdf;  // general walks
    std::vector<long> positions;
    std::vector<double> alpha;
    std::vector<OffspringCdf> offspring;

    explicit StepTables(const Model& model) {
        simple = model.walk.is_simple();
        if (simple) {
            p = model.walk.up_prob();
        } else {
            double acc = 0.0;
            for (const auto& [off, pr] : model.walk.step_dist()) {
                acc += pr;
                step_cdf.emplace_back(off, acc);
            }
        }
        positions = model.catalysts.positions();
        for (std::size_t i = 0; i < positions.size(); ++i) {
            alpha.push_back(model.catalysts[i].alpha);
            offspring.emplace_back(model.catalysts[i].offspring);
        }
    }

    int draw_step(SplitMix64& rng) const {
        if (simple) return rng.next_double() < p ? 1 : -1;
        const double u = rng.next_double();
        for (const auto& [off, c] : step_cdf)
            if (u < c) return off;
        return step_cdf.back().first;
    }

    long catalyst_at(long pos) const {
        const auto it = std::lower_bound(positions.begin(), positions.end(), pos);
        if (it == positions.end() || *it != pos) return -1;
        return it - positions.begin();
    }
};

TrialOutcome run_step_trial(const StepTables& tables, long z, long x, std::uint64_t step_cap,
                            long left_barrier, std::uint64_t max_population, SplitMix64& rng) {
    if (x < z) return TrialOutcome::exceeded;
    if (z <= left_barrier) return TrialOutcome::censored;

    std::vector<long> stack{z};
    bool any_removed = false;
    while (!stack.empty()) {
        long pos = stack.back();
        stack.pop_back();
        std::uint64_t steps = 0;
        for (;;) {
            const long ci = tables.catalyst_at(pos);
            if (ci >= 0 && rng.next_double() < tables.alpha[ci]) {
                const int kids = tables.offspring[ci].draw(rng.next_double());
                if (stack.size() + static_cast<std::size_t>(kids) > max_population)
                    return TrialOutcome::censored;
                for (int c = 0; c < kids; ++c) stack.push_back(pos);
                break;  // parent replaced by its children
            }
            if (steps++ >= step_cap) {
                any_removed = true;
                break;
            }
            pos += tables.draw_step(rng);
            if (pos > x) return TrialOutcome::exceeded;
            if (pos <= left_barrier) {
                any_removed = true;
                break;
            }
        }
    }
    return any_removed ? TrialOutcome::censored : TrialOutcome::died_out;
}

}  // namespace

TrialOutcome simulate_steps(const Model& model, long z, long x, std::uint64_t step_cap,
                            long left_barrier, SplitMix64& rng) {
    const StepTables tables(model);
    return run_step_trial(tables, z, x, step_cap, left_barrier, SimConfig{}.max_population, rng);
}

TailEstimate estimate_tail_steps(const Model& model, long z, long x, const SimConfig& cfg,
                                 std::uint64_t step_cap, long left_barrier) {
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (x < z) return {1.0, 1.0, 1.0, cfg.trials, 0};
    const StepTables tables(model);
    return aggregate_trials(cfg, [&](SplitMix64& rng) {
        return run_step_trial(tables, z, x, step_cap, left_barrier, cfg.max_population, rng);
    });
}

}  // namespace cbrw

#include "cbrw/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "cbrw/errors.hpp"

namespace cbrw {

double HittingTable::lookup(long start, std::size_t col) const {
    const long idx = start - (left_ + 1);
    return cols_[col][static_cast<std::size_t>(idx)];
}

double HittingTable::prob(long start, long target) const {
    auto it = std::find(absorbing_.begin(), absorbing_.end(), target);
    if (it == absorbing_.end()) throw std::domain_error("target is not an absorbing state");
    if (start <= left_ || start >= right_) return 0.0;
    if (start == target) return 1.0;
    if (std::find(absorbing_.begin(), absorbing_.end(), start) != absorbing_.end()) return 0.0;
    return lookup(start, static_cast<std::size_t>(it - absorbing_.begin()));
}

double HittingTable::prob_left(long start) const {
    if (start <= left_) return 1.0;
    if (start >= right_) return 0.0;
    if (std::find(absorbing_.begin(), absorbing_.end(), start) != absorbing_.end()) return 0.0;
    return lookup(start, absorbing_.size());
}

double HittingTable::prob_right(long start) const {
    if (start >= right_) return 1.0;
    if (start <= left_) return 0.0;
    if (std::find(absorbing_.begin(), absorbing_.end(), start) != absorbing_.end()) return 0.0;
    return lookup(start, absorbing_.size() + 1);
}

HittingTable absorption_table(const WalkSpec& walk, const std::vector<long>& absorbing,
                              long left_barrier, long right_barrier) {
    if (right_barrier - left_barrier < 2)
        throw std::domain_error("absorption window must contain at least one state");
    for (long a : absorbing)
        if (a <= left_barrier || a >= right_barrier)
            throw std::domain_error("absorbing states must lie strictly inside the window");

    const long lo = left_barrier + 1;
    const long n_states = right_barrier - left_barrier - 1;
    const auto& steps = walk.step_dist();

    std::vector<char> is_abs(static_cast<std::size_t>(n_states), 0);
    for (long a : absorbing) is_abs[static_cast<std::size_t>(a - lo)] = 1;

    // Unknowns: h(z) for transient z; h = P h + r per target class.
    std::vector<long> unk_index(static_cast<std::size_t>(n_states), -1);
    long n_unk = 0;
    for (long i = 0; i < n_states; ++i)
        if (!is_abs[static_cast<std::size_t>(i)]) unk_index[static_cast<std::size_t>(i)] = n_unk++;

    const std::size_t n_targets = absorbing.size() + 2;  // interior..., left bucket, right bucket
    Eigen::SparseMatrix<double> M(n_unk, n_unk);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_unk) * (steps.size() + 1));
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_unk, static_cast<Eigen::Index>(n_targets));

    for (long i = 0; i < n_states; ++i) {
        const long row = unk_index[static_cast<std::size_t>(i)];
        if (row < 0) continue;
        trip.emplace_back(row, row, 1.0);
        const long z = lo + i;
        for (const auto& [off, pr] : steps) {
            const long y = z + off;
            if (y <= left_barrier) {
                rhs(row, static_cast<Eigen::Index>(absorbing.size())) += pr;
            } else if (y >= right_barrier) {
                rhs(row, static_cast<Eigen::Index>(absorbing.size() + 1)) += pr;
            } else if (is_abs[static_cast<std::size_t>(y - lo)]) {
                auto it = std::find(absorbing.begin(), absorbing.end(), y);
                rhs(row, static_cast<Eigen::Index>(it - absorbing.begin())) += pr;
            } else {
                trip.emplace_back(row, unk_index[static_cast<std::size_t>(y - lo)], -pr);
            }
        }
    }
    M.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(M);
    lu.factorize(M);
    if (lu.info() != Eigen::Success)
        throw NumericsError("absorption oracle: singular linear system (not a proper absorbing chain)");
    Eigen::MatrixXd sol = lu.solve(rhs);

    HittingTable t;
    t.left_ = left_barrier;
    t.right_ = right_barrier;
    t.absorbing_ = absorbing;
    t.cols_.assign(n_targets, std::vector<double>(static_cast<std::size_t>(n_states), 0.0));
    // Rows for absorbing states stay zero; the accessors special-case them.
    for (long i = 0; i < n_states; ++i) {
        const long row = unk_index[static_cast<std::size_t>(i)];
        if (row < 0) continue;
        for (std::size_t c = 0; c < n_targets; ++c)
            t.cols_[c][static_cast<std::size_t>(i)] = sol(row, static_cast<Eigen::Index>(c));
    }
    return t;
}

namespace {

// One truncated evaluation of the first-jump decomposition at window size B.
ExcursionOracleRow oracle_at(const WalkSpec& walk, const std::vector<long>& positions,
                             std::optional<long> level, std::size_t i, long B) {
    const long w = positions[i];
    const long left = positions.front() - B;
    const long right = level ? *level + 1 : positions.back() + B;

    // Catalysts at or above the level barrier are unreachable with running
    // maximum <= level; they stay out of the absorbing set.
    std::vector<long> abs_states;
    std::vector<std::size_t> abs_orig;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (positions[j] < right) {
            abs_states.push_back(positions[j]);
            abs_orig.push_back(j);
        }
    }

    HittingTable table = absorption_table(walk, abs_states, left, right);

    ExcursionOracleRow row;
    row.hit.assign(positions.size(), 0.0);
    row.exceed = 0.0;
    for (const auto& [off, pr] : walk.step_dist()) {
        const long y = w + off;
        if (y >= right) {
            if (level) row.exceed += pr;
            continue;  // without a level this mass is a truncation artifact
        }
        if (y <= left) continue;
        auto cat = std::find(abs_states.begin(), abs_states.end(), y);
        if (cat != abs_states.end()) {
            row.hit[abs_orig[static_cast<std::size_t>(cat - abs_states.begin())]] += pr;
            continue;
        }
        for (std::size_t j = 0; j < abs_states.size(); ++j)
            row.hit[abs_orig[j]] += pr * table.prob(y, abs_states[j]);
        if (level) row.exceed += pr * table.prob_right(y);
    }
    return row;
}

double row_distance(const ExcursionOracleRow& a, const ExcursionOracleRow& b) {
    double d = std::abs(a.exceed - b.exceed);
    for (std::size_t j = 0; j < a.hit.size(); ++j) d = std::max(d, std::abs(a.hit[j] - b.hit[j]));
    return d;
}

ExcursionOracleRow richardson(const ExcursionOracleRow& fB, const ExcursionOracleRow& f2B) {
    ExcursionOracleRow r;
    r.hit.resize(fB.hit.size());
    for (std::size_t j = 0; j < fB.hit.size(); ++j)
        r.hit[j] = std::clamp(2.0 * f2B.hit[j] - fB.hit[j], 0.0, 1.0);
    r.exceed = std::clamp(2.0 * f2B.exceed - fB.exceed, 0.0, 1.0);
    return r;
}

}  // namespace

ExcursionOracleRow excursion_oracle(const WalkSpec& walk, const std::vector<long>& positions,
                                    std::optional<long> level, std::size_t i, double tol) {
    if (i >= positions.size()) throw std::domain_error("catalyst index out of range");
    if (level && positions[i] > *level) {
        // The excursion starts above the level: immediate exceedance.
        ExcursionOracleRow r;
        r.hit.assign(positions.size(), 0.0);
        r.exceed = 1.0;
        return r;
    }

    long span = positions.back() - positions.front() + 2;
    if (level) span = std::max(span, *level - positions.front() + 2);
    long B = 64 * span;

    const bool zero_drift = std::abs(walk.drift()) < 1e-12;
    constexpr long kMaxB = 1L << 21;

    if (!zero_drift) {
        ExcursionOracleRow prev = oracle_at(walk, positions, level, i, B);
        while (B <= kMaxB) {
            B *= 2;
            ExcursionOracleRow cur = oracle_at(walk, positions, level, i, B);
            if (row_distance(prev, cur) < tol) return cur;
            prev = cur;
        }
    } else {
        ExcursionOracleRow fB = oracle_at(walk, positions, level, i, B);
        ExcursionOracleRow f2B = oracle_at(walk, positions, level, i, 2 * B);
        ExcursionOracleRow prev = richardson(fB, f2B);
        while (B <= kMaxB) {
            B *= 2;
            fB = std::move(f2B);
            f2B = oracle_at(walk, positions, level, i, 2 * B);
            ExcursionOracleRow cur = richardson(fB, f2B);
            if (row_distance(prev, cur) < tol) return cur;
            prev = cur;
        }
    }
    throw NumericsError("absorption oracle: truncation did not stabilize within the window cap");
}

std::pair<double, double> excursion_oracle_single(const WalkSpec& walk, long x, double tol) {
    ExcursionOracleRow row = excursion_oracle(walk, {0}, x, 0, tol);
    return {row.hit[0], row.exceed};
}

}  // namespace cbrw

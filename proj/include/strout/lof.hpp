#ifndef STROUT_LOF_HPP
#define STROUT_LOF_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "strout/errors.hpp"
#include "strout/parallel.hpp"
#include "strout/strdist.hpp"

namespace strout {

struct Neighborhood {
    std::int64_t kdist_ticks = 0;
    std::vector<std::size_t> neighbors;  // ordered by (distance, index)
};

/// Per-item neighbor lists sorted by (distance, index). Built once per
/// matrix and queried for any k, which is what makes a full KFCS sweep
/// affordable.
class NeighborIndex {
public:
    explicit NeighborIndex(const DistanceMatrix& m) : m_(&m), order_(m.size()) {
        const std::size_t n = m.size();
        for (std::size_t p = 0; p < n; ++p) {
            auto& row = order_[p];
            row.reserve(n - 1);
            for (std::size_t q = 0; q < n; ++q) {
                if (q != p) row.push_back(static_cast<std::uint32_t>(q));
            }
            std::sort(row.begin(), row.end(), [&](std::uint32_t a, std::uint32_t b) {
                const auto da = m.ticks(p, a);
                const auto db = m.ticks(p, b);
                return da != db ? da < db : a < b;
            });
        }
    }

    const DistanceMatrix& matrix() const noexcept { return *m_; }
    std::size_t size() const noexcept { return order_.size(); }

    /// k-distance and k-distance neighborhood (ties included).
    Neighborhood at(std::size_t p, std::size_t k) const {
        const auto& row = order_.at(p);
        Neighborhood nb;
        nb.kdist_ticks = m_->ticks(p, row[k - 1]);
        std::size_t end = k;
        while (end < row.size() && m_->ticks(p, row[end]) == nb.kdist_ticks) ++end;
        nb.neighbors.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(end));
        return nb;
    }

private:
    const DistanceMatrix* m_;
    std::vector<std::vector<std::uint32_t>> order_;
};

namespace detail {

inline void check_k(std::size_t n, std::size_t k) {
    if (k < 1 || k >= n) {
        throw KOutOfRange("k=" + std::to_string(k) + " must satisfy 1 <= k < " + std::to_string(n));
    }
}

inline void check_unique(const DistanceMatrix& m) {
    std::set<std::u32string> seen;
    for (const auto& s : m.items()) {
        if (!seen.insert(s).second) {
            throw DuplicateItems("item \"" + utf8::encode(s) + "\" occurs more than once");
        }
    }
}

}  // namespace detail

struct KDistanceResult {
    Rational kdist;
    std::vector<std::size_t> neighbors;
};

inline KDistanceResult k_distance_neighborhood(const DistanceMatrix& m, std::size_t p, std::size_t k) {
    detail::check_k(m.size(), k);
    std::vector<std::size_t> others;
    for (std::size_t q = 0; q < m.size(); ++q) {
        if (q != p) others.push_back(q);
    }
    std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return m.ticks(p, a) != m.ticks(p, b) ? m.ticks(p, a) < m.ticks(p, b) : a < b;
    });
    const std::int64_t kd = m.ticks(p, others[k - 1]);
    std::size_t end = k;
    while (end < others.size() && m.ticks(p, others[end]) == kd) ++end;
    others.resize(end);
    return {Rational(kd, m.unit()), std::move(others)};
}

inline Rational reach_dist(const DistanceMatrix& m, std::size_t p, std::size_t o, std::size_t k) {
    if (p == o) throw SameObject("reachability distance needs two different objects");
    const Rational kd = k_distance_neighborhood(m, o, k).kdist;
    return std::max(kd, m.value(p, o));
}

/// LOF scores and their intermediates. `Scalar` is double in production and
/// an exact rational type in the oracle tests.
template <typename Scalar = double>
struct ScoreTable {
    std::vector<std::u32string> items;
    std::size_t k = 0;
    std::vector<Rational> kdist;
    std::vector<std::vector<std::size_t>> neighbors;
    std::vector<Scalar> lrd;
    std::vector<Scalar> lof;
};

template <typename Scalar = double>
ScoreTable<Scalar> lof_scores(const NeighborIndex& index, std::size_t k) {
    const DistanceMatrix& m = index.matrix();
    const std::size_t n = m.size();
    detail::check_k(n, k);

    ScoreTable<Scalar> t;
    t.items = m.items();
    t.k = k;
    t.kdist.resize(n);
    t.neighbors.resize(n);
    t.lrd.resize(n);
    t.lof.resize(n);

    std::vector<std::int64_t> kd(n);
    for (std::size_t p = 0; p < n; ++p) {
        Neighborhood nb = index.at(p, k);
        kd[p] = nb.kdist_ticks;
        t.kdist[p] = Rational(nb.kdist_ticks, m.unit());
        t.neighbors[p] = std::move(nb.neighbors);
    }
    // Reachability sums stay exact integers in tick units.
    for (std::size_t p = 0; p < n; ++p) {
        std::int64_t sum = 0;
        for (std::size_t o : t.neighbors[p]) sum += std::max(kd[o], m.ticks(p, o));
        if (sum == 0) {
            throw DuplicateItems("item \"" + utf8::encode(m.items()[p]) +
                                 "\" has zero reachability to its neighbors");
        }
        t.lrd[p] = Scalar(static_cast<std::int64_t>(t.neighbors[p].size()) * m.unit()) / Scalar(sum);
    }
    for (std::size_t p = 0; p < n; ++p) {
        Scalar acc = Scalar(0);
        for (std::size_t o : t.neighbors[p]) acc += t.lrd[o];
        t.lof[p] = acc / Scalar(static_cast<std::int64_t>(t.neighbors[p].size())) / t.lrd[p];
    }
    return t;
}

template <typename Scalar = double>
ScoreTable<Scalar> lof_scores(const DistanceMatrix& m, std::size_t k) {
    detail::check_k(m.size(), k);
    detail::check_unique(m);
    const NeighborIndex index(m);
    return lof_scores<Scalar>(index, k);
}

// ---------------------------------------------------------------------------
// KFCS k guesser

struct KfcsResult {
    std::map<std::size_t, double> consistency;  // k -> c_k
    std::size_t chosen_k = 0;
};

struct KfcsOptions {
    /// Select the k with the lowest c_k instead of the highest.
    bool minimize = false;
    unsigned threads = 1;
};

/// c_k values closer than this (relative) count as ties. Proportional score
/// vectors give a cosine of 1 only up to rounding.
inline constexpr double kConsistencyTieTolerance = 1e-12;

/// c_k = 1 - cos(U_k, V_k) for one k, given its score table.
inline double neighborhood_consistency(const ScoreTable<double>& t) {
    const std::size_t n = t.lof.size();
    double uv = 0, uu = 0, vv = 0;
    for (std::size_t p = 0; p < n; ++p) {
        double sum = 0;
        for (std::size_t o : t.neighbors[p]) sum += t.lof[o];
        const double u = sum / static_cast<double>(t.k);
        const double v = t.lof[p];
        uv += u * v;
        uu += u * u;
        vv += v * v;
    }
    return 1.0 - uv / (std::sqrt(uu) * std::sqrt(vv));
}

inline KfcsResult kfcs_guess(const NeighborIndex& index, std::size_t k_lo, std::size_t k_hi,
                             const KfcsOptions& opts = {}) {
    const std::size_t n = index.size();
    if (k_lo > k_hi) {
        throw EmptyRange("k range " + std::to_string(k_lo) + ".." + std::to_string(k_hi) + " is empty");
    }
    detail::check_k(n, k_lo);
    detail::check_k(n, k_hi);
    std::vector<double> c(k_hi - k_lo + 1);
    parallel_for(c.size(), opts.threads, [&](std::size_t i) {
        c[i] = neighborhood_consistency(lof_scores<double>(index, k_lo + i));
    });
    KfcsResult r;
    std::size_t best = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        r.consistency[k_lo + i] = c[i];
        const double tol = kConsistencyTieTolerance * std::max(1.0, std::abs(c[best]));
        const bool better = opts.minimize ? c[i] < c[best] - tol : c[i] > c[best] + tol;
        if (better) best = i;
    }
    r.chosen_k = k_lo + best;
    return r;
}

inline KfcsResult kfcs_guess(const DistanceMatrix& m, std::size_t k_lo, std::size_t k_hi,
                             const KfcsOptions& opts = {}) {
    detail::check_unique(m);
    const NeighborIndex index(m);
    return kfcs_guess(index, k_lo, k_hi, opts);
}

// ---------------------------------------------------------------------------
// Iterative multiplicative thresholding

struct KPolicy {
    enum class Mode { fixed, kfcs_once, kfcs_each_round };
    Mode mode = Mode::kfcs_once;
    std::size_t k = 0;                                           // fixed mode
    std::optional<std::pair<std::size_t, std::size_t>> range;    // unset: see default_range
    bool full_range = false;                                     // unset range covers 1..n-1
    bool minimize = false;

    /// KFCS search range for n items, clipped to 1..n-1. Without an explicit
    /// range the search stops at k = 100 unless `full_range` is set.
    std::pair<std::size_t, std::size_t> search_range(std::size_t n) const {
        if (range) return {range->first, std::min(range->second, n - 1)};
        return {1, full_range ? n - 1 : std::min<std::size_t>(n - 1, 100)};
    }

    static KPolicy fixed_k(std::size_t k) {
        KPolicy p;
        p.mode = Mode::fixed;
        p.k = k;
        return p;
    }
};

struct ThresholdRound {
    std::size_t k = 0;
    std::size_t working_size = 0;
    double mean = 0;
    double threshold = 0;
    std::vector<std::u32string> flagged;
};

struct ThresholdTrace {
    Rational factor;
    std::vector<ThresholdRound> rounds;
    std::vector<std::u32string> outliers;  // in flagging order
    std::optional<KfcsResult> kfcs;        // first guess, when KFCS was used
    ScoreTable<double> first_scores;
};

struct ThresholdOptions {
    unsigned threads = 1;
};

inline ThresholdTrace iterative_threshold(const DistanceMatrix& m, Rational factor, const KPolicy& policy,
                                          const ThresholdOptions& opts = {}) {
    if (factor <= 0) throw ConfigError("threshold factor must be positive");
    if (m.size() < 3) {
        throw DatasetTooSmall("need at least 3 unique items, got " + std::to_string(m.size()));
    }
    detail::check_unique(m);

    ThresholdTrace trace;
    trace.factor = factor;
    const double f = boost::rational_cast<double>(factor);

    auto guess = [&](const NeighborIndex& index) {
        const auto [lo, hi] = policy.search_range(index.size());
        return kfcs_guess(index, lo, hi, {policy.minimize, opts.threads});
    };

    std::vector<std::size_t> working(m.size());
    std::iota(working.begin(), working.end(), 0);
    std::size_t k = policy.k;
    if (policy.mode == KPolicy::Mode::fixed) detail::check_k(m.size(), k);

    for (bool first = true;; first = false) {
        const DistanceMatrix sub = first ? m : m.subset(working);
        if (sub.size() < 2) break;
        const NeighborIndex index(sub);
        if (policy.mode == KPolicy::Mode::kfcs_each_round ||
            (policy.mode == KPolicy::Mode::kfcs_once && first)) {
            KfcsResult g = guess(index);
            k = g.chosen_k;
            if (first) trace.kfcs = std::move(g);
        }
        if (k >= sub.size()) break;  // a reused k no longer fits the shrunken set

        ScoreTable<double> scores = lof_scores<double>(index, k);
        double total = 0;
        for (double v : scores.lof) total += v;
        ThresholdRound round;
        round.k = k;
        round.working_size = sub.size();
        round.mean = total / static_cast<double>(scores.lof.size());
        round.threshold = f * round.mean;

        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < scores.lof.size(); ++i) {
            if (scores.lof[i] > round.threshold) {
                round.flagged.push_back(sub.items()[i]);
            } else {
                keep.push_back(working[i]);
            }
        }
        if (first) trace.first_scores = std::move(scores);
        const bool done = round.flagged.empty();
        trace.outliers.insert(trace.outliers.end(), round.flagged.begin(), round.flagged.end());
        trace.rounds.push_back(std::move(round));
        if (done) break;
        working = std::move(keep);
    }
    return trace;
}

/// Convenience entry: deduplicates, builds the distance matrix, thresholds.
inline ThresholdTrace iterative_threshold(const std::vector<std::u32string>& items, const WeightConfig& w,
                                          Rational factor, const KPolicy& policy,
                                          const ThresholdOptions& opts = {}) {
    std::vector<std::u32string> unique;
    std::set<std::u32string> seen;
    for (const auto& s : items) {
        if (seen.insert(s).second) unique.push_back(s);
    }
    if (unique.size() < 3) {
        throw DatasetTooSmall("need at least 3 unique items, got " + std::to_string(unique.size()));
    }
    const DistanceMatrix m = distance_matrix(w, unique, opts.threads);
    return iterative_threshold(m, factor, policy, opts);
}

}  // namespace strout

#endif  // STROUT_LOF_HPP

#ifndef STROUT_HILRE_DETECT_HPP
#define STROUT_HILRE_DETECT_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "strout/errors.hpp"
#include "strout/hierarchy.hpp"
#include "strout/hilre.hpp"
#include "strout/parallel.hpp"
#include "strout/rational.hpp"
#include "strout/utf8.hpp"

namespace strout {

// ---------------------------------------------------------------------------
// Inclusion

/// Index/count walk over both atom lists with star absorption. Fast, but on
/// its own it accepts some pairs that are not language inclusions (e.g.
/// `a+` against `a`); `subseteq` pairs it with an exact check. The walk can
/// also miss inclusions, which only makes `subseteq` stricter.
inline bool subseteq_walk(const Hilre& h1, const Hilre& h2, const Hierarchy& h) {
    if (h1.empty_marker || h1.atoms.empty()) return true;
    const auto& a = h1.atoms;
    const auto& b = h2.atoms;
    std::size_t i1 = 0, i2 = 0;
    std::uint32_t c1 = 0, c2 = 0;
    while (i1 < a.size() && i2 < b.size()) {
        while (c1 < a[i1].count && c2 < b[i2].count) {
            if (!h.is_subset(a[i1].element, b[i2].element)) return false;
            ++c1;
            ++c2;
        }
        if (c2 == b[i2].count) {
            if (b[i2].has_multiple) {
                if (c1 == a[i1].count) {
                    ++i1;
                    c1 = 0;
                }
                while (i1 < a.size() && h.is_subset(a[i1].element, b[i2].element)) {
                    ++i1;
                    c1 = 0;
                }
                ++i2;
                c2 = 0;
                continue;
            }
            ++i2;
            c2 = 0;
        }
        if (c1 == a[i1].count) {
            if (a[i1].has_multiple) {
                while (i2 < b.size() && h.is_subset(a[i1].element, b[i2].element)) {
                    ++i2;
                    c2 = 0;
                }
            }
            ++i1;
            c1 = 0;
        }
    }
    // Trailing `x*` atoms of h2 accept the empty remainder.
    while (i1 == a.size() && i2 < b.size() && c2 == 0 && b[i2].count == 0 && b[i2].has_multiple) ++i2;
    return i1 == a.size() && i2 == b.size();
}

namespace detail {

// Position automaton of an atom list: state (i, j) = atom i with j of its
// mandatory characters consumed; the last state accepts.
struct PositionNfa {
    struct Edge {
        NodeId cls;
        std::uint32_t to;
    };
    std::vector<std::vector<Edge>> edges;
    std::vector<std::vector<std::uint32_t>> eps;
    std::uint32_t accept = 0;

    PositionNfa(const Hilre& r) {
        std::uint32_t base = 0;
        for (const Atom& a : r.atoms) base += a.count + 1;
        accept = base;
        edges.resize(base + 1);
        eps.resize(base + 1);
        base = 0;
        for (const Atom& a : r.atoms) {
            for (std::uint32_t j = 0; j < a.count; ++j) edges[base + j].push_back({a.element, base + j + 1});
            if (a.has_multiple) edges[base + a.count].push_back({a.element, base + a.count});
            eps[base + a.count].push_back(base + a.count + 1);
            base += a.count + 1;
        }
    }

    std::size_t size() const { return edges.size(); }

    // Epsilon edges only point forward, so one ascending pass closes a set.
    void close(std::vector<char>& set) const {
        for (std::size_t s = 0; s < set.size(); ++s) {
            if (!set[s]) continue;
            for (std::uint32_t t : eps[s]) set[t] = 1;
        }
    }
};

}  // namespace detail

/// Exact language inclusion L(h1) ⊆ L(h2), by exploring the product of h1's
/// position automaton with the subset construction of h2's. Characters are
/// grouped into regions that no class of h2 can tell apart.
inline bool language_included(const Hilre& h1, const Hilre& h2, const Hierarchy& h) {
    if (h1.empty_marker) return true;
    if (h2.empty_marker) return false;  // every atom list matches something
    const detail::PositionNfa n1(h1), n2(h2);

    std::vector<NodeId> h2_classes;
    for (const Atom& x : h2.atoms) h2_classes.push_back(x.element);
    std::sort(h2_classes.begin(), h2_classes.end());
    h2_classes.erase(std::unique(h2_classes.begin(), h2_classes.end()), h2_classes.end());

    // Regions of a class: itself minus nested h2 classes, and each nested
    // class minus its own nested ones; only non-empty ones are kept.
    std::unordered_map<NodeId, std::vector<NodeId>> region_cache;
    auto regions = [&](NodeId e1) -> const std::vector<NodeId>& {
        auto it = region_cache.find(e1);
        if (it != region_cache.end()) return it->second;
        std::vector<NodeId> family{e1};
        for (NodeId e2 : h2_classes) {
            if (h.is_strict_subset(e2, e1)) family.push_back(e2);
        }
        std::vector<NodeId> out;
        for (NodeId x : family) {
            std::size_t covered = 0;
            for (NodeId y : family) {
                if (!h.is_strict_subset(y, x)) continue;
                bool maximal = true;
                for (NodeId z : family) {
                    if (z != y && h.is_strict_subset(y, z) && h.is_strict_subset(z, x)) {
                        maximal = false;
                        break;
                    }
                }
                if (maximal) covered += h.node(y).charset.size();
            }
            if (h.node(x).charset.size() > covered) out.push_back(x);
        }
        return region_cache.emplace(e1, std::move(out)).first->second;
    };

    std::vector<char> start2(n2.size(), 0);
    start2[0] = 1;
    n2.close(start2);

    std::deque<std::pair<std::uint32_t, std::vector<char>>> work;
    std::unordered_set<std::string> seen;
    auto push = [&](std::uint32_t q, std::vector<char> s) {
        std::string key(reinterpret_cast<const char*>(&q), sizeof q);
        key.append(s.begin(), s.end());
        if (seen.insert(std::move(key)).second) work.emplace_back(q, std::move(s));
    };
    push(0, start2);
    while (!work.empty()) {
        auto [q, set] = std::move(work.front());
        work.pop_front();
        if (q == n1.accept && !set[n2.accept]) return false;
        for (std::uint32_t t : n1.eps[q]) push(t, set);
        for (const auto& e : n1.edges[q]) {
            for (NodeId region : regions(e.cls)) {
                std::vector<char> next(n2.size(), 0);
                bool any = false;
                for (std::size_t s = 0; s < set.size(); ++s) {
                    if (!set[s]) continue;
                    for (const auto& f : n2.edges[s]) {
                        if (h.is_subset(region, f.cls)) {
                            next[f.to] = 1;
                            any = true;
                        }
                    }
                }
                // h1 can always go on to accept, h2 never can from here.
                if (!any) return false;
                n2.close(next);
                push(e.to, std::move(next));
            }
        }
    }
    return true;
}

/// h1 ⊆ h2: the index/count walk, confirmed by exact language inclusion so
/// that a positive answer is always sound.
inline bool subseteq(const Hilre& h1, const Hilre& h2, const Hierarchy& h) {
    return subseteq_walk(h1, h2, h) && language_included(h1, h2, h);
}

// ---------------------------------------------------------------------------
// Candidate enumeration

struct Candidate {
    Hilre expr;
    std::string rendering;
    std::size_t match_count = 0;          // with multiplicity
    std::vector<std::uint64_t> matched;   // bit per distinct dataset string
};

/// Every HiLRE learned from some subset of the dataset, plus ∅, ordered by
/// ascending (match_count, rendering).
struct CandidateSet {
    std::vector<std::u32string> strings;  // distinct, sorted
    std::vector<std::size_t> weights;     // multiplicity of each string
    std::size_t total = 0;                // dataset size with multiplicity
    std::vector<Candidate> candidates;

    std::size_t size() const noexcept { return candidates.size(); }

    std::optional<std::size_t> find(const std::string& rendering) const {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (candidates[i].rendering == rendering) return i;
        }
        return std::nullopt;
    }
};

struct EnumerationOptions {
    std::size_t cap = 50000;
    unsigned threads = 1;
};

/// Worklist closure: seed with every string, then for each candidate and
/// each string it does not match, learn the widened expression. Work is
/// done one FIFO generation at a time so the result does not depend on the
/// thread count.
inline CandidateSet get_all_hilres(const std::vector<std::u32string>& data, const Hierarchy& h,
                                   const EnumerationOptions& opts = {}) {
    if (data.empty()) throw EmptyDataset("dataset is empty");
    CandidateSet cs;
    {
        std::map<std::u32string, std::size_t> counts;
        for (const auto& s : data) ++counts[s];
        for (auto& [s, c] : counts) {
            cs.strings.push_back(s);
            cs.weights.push_back(c);
            cs.total += c;
        }
    }
    const std::size_t m = cs.strings.size();
    const std::size_t words = (m + 63) / 64;
    std::vector<std::vector<NodeId>> leaves;
    leaves.reserve(m);
    for (const auto& s : cs.strings) {
        std::vector<NodeId> l;
        for (char32_t c : s) l.push_back(h.leaf(c));
        leaves.push_back(std::move(l));
    }

    struct Entry {
        std::vector<detail::Slot> slots;
        Hilre expr;
        std::vector<std::uint64_t> matched;
        std::size_t match_count = 0;
    };
    std::vector<Entry> entries;
    std::unordered_map<std::string, std::size_t> index;
    auto insert = [&](std::vector<detail::Slot> l) {
        Hilre e = detail::to_hilre(l);
        std::string key = e.key();
        if (index.count(key)) return;
        if (entries.size() + 2 > opts.cap) {
            throw CandidateExplosion("more than " + std::to_string(opts.cap) + " candidate expressions");
        }
        index.emplace(std::move(key), entries.size());
        entries.push_back({std::move(l), std::move(e), {}, 0});
    };
    for (const auto& s : cs.strings) insert(detail::to_slots(initial_string(s, h)));

    std::size_t done = 0;
    while (done < entries.size()) {
        const std::size_t end = entries.size();
        std::vector<std::vector<std::vector<detail::Slot>>> children(end - done);
        parallel_for(end - done, opts.threads, [&](std::size_t k) {
            Entry& en = entries[done + k];
            en.matched.assign(words, 0);
            const bool wf = is_wellformed(en.expr, h);
            for (std::size_t j = 0; j < m; ++j) {
                if (matches(en.expr, leaves[j], h, wf)) {
                    en.matched[j / 64] |= std::uint64_t{1} << (j % 64);
                    en.match_count += cs.weights[j];
                } else {
                    children[k].push_back(detail::align(en.slots, leaves[j], h));
                }
            }
        });
        for (auto& batch : children) {
            for (auto& l : batch) insert(std::move(l));
        }
        done = end;
    }

    cs.candidates.reserve(entries.size() + 1);
    cs.candidates.push_back({Hilre::empty_set(), "∅", 0, std::vector<std::uint64_t>(words, 0)});
    for (auto& en : entries) {
        cs.candidates.push_back({std::move(en.expr), {}, en.match_count, std::move(en.matched)});
        cs.candidates.back().rendering = render(cs.candidates.back().expr, h);
    }
    std::sort(cs.candidates.begin(), cs.candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.match_count != y.match_count) return x.match_count < y.match_count;
        return x.rendering < y.rendering;
    });
    return cs;
}

// ---------------------------------------------------------------------------
// Selection

/// For every candidate, the smallest gap n − n' to a candidate strictly
/// below it (∅ is below everything, so the gap never exceeds n). Entry for
/// ∅ itself is 0.
inline std::vector<std::size_t> match_gaps(const CandidateSet& cs, const Hierarchy& h, unsigned threads = 1) {
    const auto& c = cs.candidates;
    std::vector<std::size_t> gap(c.size(), 0);
    auto bits_within = [](const std::vector<std::uint64_t>& inner, const std::vector<std::uint64_t>& outer) {
        for (std::size_t w = 0; w < inner.size(); ++w) {
            if (inner[w] & ~outer[w]) return false;
        }
        return true;
    };
    parallel_for(c.size(), threads, [&](std::size_t i) {
        if (c[i].expr.empty_marker) return;
        const std::size_t n = c[i].match_count;
        // Candidates are sorted by match count; walk down from the last one
        // with n' <= n. A sound inclusion implies nested match sets.
        std::size_t hi = static_cast<std::size_t>(
            std::upper_bound(c.begin(), c.end(), n,
                             [](std::size_t v, const Candidate& x) { return v < x.match_count; }) -
            c.begin());
        for (std::size_t j = hi; j-- > 0;) {
            if (j == i) continue;
            const Candidate& o = c[j];
            if (!bits_within(o.matched, c[i].matched)) continue;
            if (!subseteq(o.expr, c[i].expr, h)) continue;
            if (o.match_count == n && subseteq(c[i].expr, o.expr, h)) continue;
            gap[i] = n - o.match_count;
            return;
        }
        gap[i] = n;
    });
    return gap;
}

struct Selection {
    std::size_t index = 0;  // into CandidateSet::candidates
    Hilre expr = Hilre::empty_set();
    std::string rendering = "∅";
    std::size_t match_count = 0;
    std::size_t gap = 0;
};

/// Walks candidates from most to least specific and keeps the one whose
/// gap to its nearest strict subset is largest, among those matching at
/// least p_min of the dataset. Ties keep the earlier candidate.
inline Selection find_h_star(const CandidateSet& cs, const std::vector<std::size_t>& gaps, Rational p_min) {
    if (p_min < 0 || p_min > 1) throw ConfigError("p_min must lie in [0, 1]");
    Selection best;
    std::size_t best_gap = 0;
    for (std::size_t i = 0; i < cs.candidates.size(); ++i) {
        const Candidate& c = cs.candidates[i];
        if (c.expr.empty_marker) {
            if (best.rendering == "∅") best.index = i;
            continue;
        }
        const bool enough = static_cast<std::int64_t>(c.match_count) * p_min.denominator() >=
                            p_min.numerator() * static_cast<std::int64_t>(cs.total);
        if (gaps[i] > best_gap && enough) {
            best_gap = gaps[i];
            best = {i, c.expr, c.rendering, c.match_count, gaps[i]};
        }
    }
    return best;
}

inline Selection find_h_star(const CandidateSet& cs, const Hierarchy& h, Rational p_min, unsigned threads = 1) {
    return find_h_star(cs, match_gaps(cs, h, threads), p_min);
}

struct Detection {
    Selection h_star;
    std::vector<std::u32string> outliers;  // distinct, sorted
    std::size_t candidate_count = 0;
    bool degenerate = false;  // ∅ selected: everything is flagged
};

inline Detection outliers_for(const CandidateSet& cs, const Selection& sel, const Hierarchy& h) {
    Detection d;
    d.h_star = sel;
    d.candidate_count = cs.size();
    d.degenerate = sel.expr.empty_marker;
    for (const auto& s : cs.strings) {
        if (!matches(sel.expr, s, h)) d.outliers.push_back(s);
    }
    return d;
}

/// End-to-end detection. Repeated strings count with their multiplicity
/// towards match counts and |D|.
inline Detection detect_outliers(const std::vector<std::u32string>& data, const Hierarchy& h, Rational p_min,
                                 const EnumerationOptions& opts = {}) {
    const CandidateSet cs = get_all_hilres(data, h, opts);
    return outliers_for(cs, find_h_star(cs, h, p_min, opts.threads), h);
}

}  // namespace strout

#endif  // STROUT_HILRE_DETECT_HPP

#ifndef STROUT_HILRE_HPP
#define STROUT_HILRE_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strout/errors.hpp"
#include "strout/hierarchy.hpp"
#include "strout/utf8.hpp"

namespace strout {

/// One element of a hierarchical left regular expression: `count` mandatory
/// characters of class `element`, then arbitrarily many more if
/// `has_multiple` is set.
struct Atom {
    NodeId element = 0;
    std::uint32_t count = 0;
    bool has_multiple = false;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// A HiLRE. `empty_marker` denotes the expression that matches nothing; an
/// empty atom list with the marker unset matches only the empty string.
struct Hilre {
    std::vector<Atom> atoms;
    bool empty_marker = false;

    static Hilre empty_set() { return {{}, true}; }
    static Hilre epsilon() { return {{}, false}; }

    /// Compact structural key; equal keys iff equal renderings (labels of
    /// internal classes are unique within a hierarchy).
    std::string key() const {
        if (empty_marker) return std::string(1, '\xff');
        std::string k;
        k.reserve(atoms.size() * 9);
        for (const Atom& a : atoms) {
            for (int b = 0; b < 4; ++b) k.push_back(static_cast<char>((a.element >> (8 * b)) & 0xff));
            for (int b = 0; b < 4; ++b) k.push_back(static_cast<char>((a.count >> (8 * b)) & 0xff));
            k.push_back(a.has_multiple ? 1 : 0);
        }
        return k;
    }

    friend bool operator==(const Hilre&, const Hilre&) = default;
};

/// Per-class summary a Learning keeps for its element and every ancestor.
struct LearningLevel {
    NodeId node = 0;
    std::uint32_t count = 0;
    bool has_multiple = false;

    friend bool operator==(const LearningLevel&, const LearningLevel&) = default;
};

/// Incremental learning record for one expression slot.
///
/// `per_ancestor[0]` describes the slot itself. Entry `a` describes the run
/// of subsequent slots whose elements lie inside that ancestor class, i.e.
/// how many characters the ancestor would match from here on; the counts
/// therefore never decrease toward the root. `max` is scratch space for the
/// learner (longest segment this slot has absorbed).
struct Learning {
    NodeId element = 0;
    std::uint32_t max = 0;
    std::vector<LearningLevel> per_ancestor;

    const LearningLevel& own() const { return per_ancestor.front(); }

    friend bool operator==(const Learning&, const Learning&) = default;
};

using Learnings = std::vector<Learning>;

// ---------------------------------------------------------------------------
// Well-formedness

/// Definition conditions, with the first and last element allowed to carry a
/// star (there is no neighbor to constrain them on that side):
///  * a fixed element is not a strict superset of its successor;
///  * a starred element contains its predecessor and is disjoint from its
///    successor.
inline bool is_wellformed(const Hilre& r, const Hierarchy& h) {
    if (r.empty_marker) return r.atoms.empty();
    const auto& a = r.atoms;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].count == 0 && !a[i].has_multiple) return false;
        const bool has_next = i + 1 < a.size();
        if (a[i].has_multiple) {
            if (i > 0 && !h.is_subset(a[i - 1].element, a[i].element)) return false;
            if (has_next && !h.is_disjoint(a[i].element, a[i + 1].element)) return false;
        } else if (has_next && h.is_strict_subset(a[i + 1].element, a[i].element)) {
            return false;
        }
    }
    return true;
}

namespace detail {

struct Slot {
    Atom atom;
    std::uint32_t max = 0;
};

inline Slot merge_slots(const Slot& a, const Slot& b, const Hierarchy& h) {
    return {{h.lca(a.atom.element, b.atom.element), a.atom.count + b.atom.count,
             a.atom.has_multiple || b.atom.has_multiple},
            a.max + b.max};
}

/// Generalizes a slot sequence until it is well-formed and has no two equal
/// adjacent elements. Each step merges the leftmost offending pair into
/// their least common ancestor class, which only ever widens the language.
inline void canonicalize(std::vector<Slot>& s, const Hierarchy& h) {
    for (;;) {
        std::size_t merge_at = s.size();
        for (std::size_t i = 0; i < s.size() && merge_at == s.size(); ++i) {
            const Atom& a = s[i].atom;
            const bool has_next = i + 1 < s.size();
            if (has_next && a.element == s[i + 1].atom.element) {
                merge_at = i;
            } else if (a.has_multiple) {
                if (i > 0 && !h.is_subset(s[i - 1].atom.element, a.element)) {
                    merge_at = i - 1;
                } else if (has_next && !h.is_disjoint(a.element, s[i + 1].atom.element)) {
                    merge_at = i;
                }
            } else if (has_next && h.is_strict_subset(s[i + 1].atom.element, a.element)) {
                merge_at = i;
            }
        }
        if (merge_at == s.size()) return;
        s[merge_at] = merge_slots(s[merge_at], s[merge_at + 1], h);
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(merge_at) + 1);
    }
}

inline Learnings to_learnings(const std::vector<Slot>& slots, const Hierarchy& h) {
    Learnings out;
    out.reserve(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        Learning l;
        l.element = slots[i].atom.element;
        l.max = slots[i].max;
        for (NodeId anc : h.ancestors(l.element)) {
            LearningLevel lvl{anc, 0, false};
            for (std::size_t j = i; j < slots.size() && h.is_subset(slots[j].atom.element, anc); ++j) {
                lvl.count += slots[j].atom.count;
                lvl.has_multiple = lvl.has_multiple || slots[j].atom.has_multiple;
            }
            l.per_ancestor.push_back(lvl);
        }
        out.push_back(std::move(l));
    }
    return out;
}

inline std::vector<Slot> to_slots(const Learnings& l) {
    std::vector<Slot> out;
    out.reserve(l.size());
    for (const Learning& x : l) {
        out.push_back({{x.element, x.own().count, x.own().has_multiple}, x.max});
    }
    return out;
}

inline Hilre to_hilre(const std::vector<Slot>& slots) {
    Hilre r;
    r.atoms.reserve(slots.size());
    for (const auto& s : slots) r.atoms.push_back(s.atom);
    return r;
}

inline constexpr NodeId kUnknownLeaf = std::numeric_limits<NodeId>::max();

}  // namespace detail

/// Leaf ids of a string; characters outside the hierarchy map to a sentinel
/// that no class contains.
inline std::vector<NodeId> leaf_ids(const std::u32string& s, const Hierarchy& h) {
    std::vector<NodeId> out;
    out.reserve(s.size());
    for (char32_t c : s) {
        auto id = h.find_leaf(c);
        out.push_back(id ? *id : detail::kUnknownLeaf);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matching

namespace detail {

inline bool in_class(NodeId leaf, NodeId cls, const Hierarchy& h) {
    return leaf != kUnknownLeaf && h.is_subset(leaf, cls);
}

// Exact membership by position-set simulation; valid for any atom list.
inline bool matches_exact(const Hilre& r, std::span<const NodeId> s, const Hierarchy& h) {
    const std::size_t n = s.size();
    std::vector<char> cur(n + 1, 0), next(n + 1, 0);
    cur[0] = 1;
    for (const Atom& a : r.atoms) {
        std::fill(next.begin(), next.end(), 0);
        bool any = false;
        for (std::size_t p = 0; p <= n; ++p) {
            if (!cur[p]) continue;
            std::size_t q = p;
            bool ok = true;
            for (std::uint32_t c = 0; c < a.count; ++c, ++q) {
                if (q >= n || !in_class(s[q], a.element, h)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            next[q] = 1;
            any = true;
            if (a.has_multiple) {
                while (q < n && in_class(s[q], a.element, h)) next[++q] = 1;
            }
        }
        if (!any) return false;
        std::swap(cur, next);
    }
    return cur[n] != 0;
}

// Greedy left-to-right consumption; exact for well-formed expressions,
// because a starred class is disjoint from whatever follows it.
inline bool matches_greedy(const Hilre& r, std::span<const NodeId> s, const Hierarchy& h) {
    std::size_t pos = 0;
    const std::size_t n = s.size();
    for (const Atom& a : r.atoms) {
        if (pos + a.count > n) return false;
        for (std::uint32_t c = 0; c < a.count; ++c, ++pos) {
            if (!in_class(s[pos], a.element, h)) return false;
        }
        if (a.has_multiple) {
            while (pos < n && in_class(s[pos], a.element, h)) ++pos;
        }
    }
    return pos == n;
}

}  // namespace detail

/// Membership test on pre-resolved leaf ids. `wellformed` selects the
/// linear greedy matcher; otherwise a position-set simulation is used.
inline bool matches(const Hilre& r, std::span<const NodeId> leaves, const Hierarchy& h, bool wellformed) {
    if (r.empty_marker) return false;
    return wellformed ? detail::matches_greedy(r, leaves, h) : detail::matches_exact(r, leaves, h);
}

inline bool matches(const Hilre& r, const std::u32string& s, const Hierarchy& h) {
    const auto leaves = leaf_ids(s, h);
    return matches(r, leaves, h, is_wellformed(r, h));
}

// ---------------------------------------------------------------------------
// Learning

inline Learnings initial_string(const std::u32string& s, const Hierarchy& h) {
    std::vector<detail::Slot> slots;
    for (std::size_t i = 0; i < s.size();) {
        const NodeId leaf = h.leaf(s[i]);
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        const auto run = static_cast<std::uint32_t>(j - i);
        slots.push_back({{leaf, run, false}, run});
        i = j;
    }
    return detail::to_learnings(slots, h);
}

inline Hilre generate_reg_ex(const Learnings& l, const Hierarchy& h) {
    auto slots = detail::to_slots(l);
    detail::canonicalize(slots, h);
    return detail::to_hilre(slots);
}

namespace detail {

/// Aligns a leaf sequence against the slots by minimum generalization cost
/// (class raised: depth drop; count lowered: 1; star introduced: 2), widens
/// each slot to cover its segment and restores well-formedness by merging.
/// Ties prefer longer segments for earlier slots.
inline std::vector<Slot> align(const std::vector<Slot>& slots, std::span<const NodeId> leaves,
                               const Hierarchy& h) {
    const std::size_t n = slots.size();
    const std::size_t len = leaves.size();

    if (n == 0) {
        // Only the empty string so far: one starred class over the new string.
        if (len == 0) return {};
        NodeId cls = leaves[0];
        for (NodeId x : leaves) cls = h.lca(cls, x);
        std::vector<Slot> one{{{cls, 0, true}, static_cast<std::uint32_t>(len)}};
        canonicalize(one, h);
        return one;
    }

    constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max() / 2;
    // best[i][j]: cheapest alignment of slots i.. against leaves j..
    const std::size_t w = len + 1;
    std::vector<std::uint32_t> best((n + 1) * w, kInf);
    std::vector<std::uint32_t> choice((n + 1) * w, 0);
    std::vector<std::uint32_t> cost_to(w);
    best[n * w + len] = 0;
    for (std::size_t i = n; i-- > 0;) {
        const Atom& a = slots[i].atom;
        const unsigned depth = h.depth(a.element);
        for (std::size_t j = 0; j <= len; ++j) {
            // Widening cost for every segment end e, class grown left to right.
            NodeId cls = a.element;
            for (std::size_t e = j; e <= len; ++e) {
                if (e > j) cls = h.lca(cls, leaves[e - 1]);
                const auto seg = static_cast<std::uint32_t>(e - j);
                std::uint32_t c = depth - h.depth(cls);
                if (seg < a.count) c += 1;
                if (!a.has_multiple && seg != a.count) c += 2;
                cost_to[e] = c;
            }
            std::uint32_t best_cost = kInf;
            std::uint32_t best_end = 0;
            for (std::size_t e = len + 1; e-- > j;) {
                const std::uint32_t rest = best[(i + 1) * w + e];
                if (rest >= kInf) continue;
                if (rest + cost_to[e] < best_cost) {
                    best_cost = rest + cost_to[e];
                    best_end = static_cast<std::uint32_t>(e);
                }
            }
            best[i * w + j] = best_cost;
            choice[i * w + j] = best_end;
        }
    }

    std::vector<Slot> out;
    out.reserve(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t e = choice[i * w + j];
        const Atom& a = slots[i].atom;
        NodeId cls = a.element;
        for (std::size_t p = j; p < e; ++p) cls = h.lca(cls, leaves[p]);
        const auto seg = static_cast<std::uint32_t>(e - j);
        out.push_back({{cls, std::min(a.count, seg), a.has_multiple || seg != a.count},
                       std::max(slots[i].max, seg)});
        j = e;
    }
    canonicalize(out, h);
    return out;
}


}  // namespace detail

/// Adds one string so that the generated expression also matches it. A
/// string that already matches leaves the learnings unchanged.
inline Learnings add_string(const Learnings& l, const std::u32string& s, const Hierarchy& h) {
    std::vector<NodeId> leaves;
    leaves.reserve(s.size());
    for (char32_t c : s) leaves.push_back(h.leaf(c));
    const Hilre current = generate_reg_ex(l, h);
    if (matches(current, leaves, h, is_wellformed(current, h))) return l;
    return detail::to_learnings(detail::align(detail::to_slots(l), leaves, h), h);
}

inline Learnings learnings_from(const Hilre& r, const Hierarchy& h) {
    std::vector<detail::Slot> slots;
    for (const Atom& a : r.atoms) slots.push_back({a, a.count});
    return detail::to_learnings(slots, h);
}

/// Learns one expression for a whole dataset, inserting strings in
/// lexicographic (code point) order.
inline Hilre hilre_generalize(const std::vector<std::u32string>& data, const Hierarchy& h) {
    if (data.empty()) throw EmptyDataset("cannot generalize an empty dataset");
    std::vector<std::u32string> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    Learnings l = initial_string(sorted.front(), h);
    for (std::size_t i = 1; i < sorted.size(); ++i) l = add_string(l, sorted[i], h);
    return generate_reg_ex(l, h);
}

// ---------------------------------------------------------------------------
// Text form

namespace detail {

inline bool needs_escape(char32_t c) {
    return c == U'\\' || c == U'[' || c == U']' || c == U'{' || c == U'}' || c == U'*' ||
           c == U'+' || c == U'∅';
}

}  // namespace detail

inline std::string render(const Hilre& r, const Hierarchy& h) {
    if (r.empty_marker) return "∅";
    std::string out;
    for (const Atom& a : r.atoms) {
        const auto& node = h.node(a.element);
        if (node.is_leaf()) {
            const char32_t c = node.charset.front();
            if (detail::needs_escape(c)) out += '\\';
            out += utf8::encode(c);
        } else {
            out += "[" + node.label + "]";
        }
        if (a.has_multiple) {
            if (a.count == 0) {
                out += "*";
            } else if (a.count == 1) {
                out += "+";
            } else {
                out += "{" + std::to_string(a.count) + ",}";
            }
        } else if (a.count != 1) {
            out += "{" + std::to_string(a.count) + "}";
        }
    }
    return out;
}

/// Parses the rendered form. Adjacent equal elements are merged (this does
/// not change the language); well-formedness is not required.
inline Hilre parse_hilre(std::string_view text, const Hierarchy& h) {
    const std::u32string t = utf8::decode(text);
    if (t == U"∅") return Hilre::empty_set();

    std::vector<std::string> labels;
    for (NodeId i = 0; i < h.size(); ++i) {
        if (!h.node(i).is_leaf()) labels.push_back(h.label(i));
    }
    std::sort(labels.begin(), labels.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

    Hilre r;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw RegexParseError(why + " at character " + std::to_string(i) + " of \"" + std::string(text) + "\"");
    };
    while (i < t.size()) {
        NodeId element = 0;
        if (t[i] == U'\\') {
            if (i + 1 >= t.size()) fail("dangling escape");
            element = h.leaf(t[i + 1]);
            i += 2;
        } else if (t[i] == U'[') {
            bool found = false;
            for (const auto& lab : labels) {
                const std::u32string l32 = utf8::decode(lab);
                if (t.compare(i + 1, l32.size(), l32) == 0 && i + 1 + l32.size() < t.size() &&
                    t[i + 1 + l32.size()] == U']') {
                    element = *h.find_label(lab);
                    i += l32.size() + 2;
                    found = true;
                    break;
                }
            }
            if (!found) fail("unknown class");
        } else if (t[i] == U']' || t[i] == U'{' || t[i] == U'}' || t[i] == U'*' || t[i] == U'+') {
            fail("unexpected quantifier");
        } else {
            element = h.leaf(t[i]);
            ++i;
        }
        Atom a{element, 1, false};
        if (i < t.size()) {
            if (t[i] == U'*') {
                a = {element, 0, true};
                ++i;
            } else if (t[i] == U'+') {
                a.has_multiple = true;
                ++i;
            } else if (t[i] == U'{') {
                std::size_t j = i + 1;
                std::uint64_t n = 0;
                while (j < t.size() && t[j] >= U'0' && t[j] <= U'9') n = n * 10 + (t[j++] - U'0');
                if (j == i + 1 || j >= t.size() || n > 1000000) fail("bad repetition count");
                a.count = static_cast<std::uint32_t>(n);
                if (t[j] == U',') {
                    a.has_multiple = true;
                    ++j;
                }
                if (j >= t.size() || t[j] != U'}') fail("unterminated repetition");
                if (a.count == 0 && !a.has_multiple) fail("zero repetition");
                i = j + 1;
            }
        }
        if (!r.atoms.empty() && r.atoms.back().element == a.element) {
            r.atoms.back().count += a.count;
            r.atoms.back().has_multiple = r.atoms.back().has_multiple || a.has_multiple;
        } else {
            r.atoms.push_back(a);
        }
    }
    return r;
}

}  // namespace strout

#endif  // STROUT_HILRE_HPP

#ifndef STROUT_STRDIST_HPP
#define STROUT_STRDIST_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "strout/errors.hpp"
#include "strout/hierarchy.hpp"
#include "strout/parallel.hpp"
#include "strout/rational.hpp"
#include "strout/utf8.hpp"

namespace strout {

enum class Metric { unweighted, hierarchical };

inline const char* to_string(Metric m) {
    return m == Metric::unweighted ? "unweighted" : "hierarchical";
}

/// Edit-operation costs. In hierarchical mode a substitution costs
/// `substitution_scale` times the tree path length between the two
/// characters; insertions and deletions always cost `indel_cost`.
struct WeightConfig {
    Metric mode = Metric::unweighted;
    std::shared_ptr<const Hierarchy> hierarchy;
    Rational substitution_scale{1, 4};
    Rational indel_cost{1};

    static WeightConfig unweighted() { return {}; }

    static WeightConfig hierarchical(Hierarchy h, Rational scale = {1, 4}, Rational indel = {1}) {
        WeightConfig w;
        w.mode = Metric::hierarchical;
        w.hierarchy = std::make_shared<const Hierarchy>(std::move(h));
        w.substitution_scale = scale;
        w.indel_cost = indel;
        return w;
    }

    /// Common denominator of every cost, so DP runs on exact integers.
    std::int64_t unit() const {
        if (mode == Metric::unweighted) return 1;
        return std::lcm(substitution_scale.denominator(), indel_cost.denominator());
    }

    std::int64_t indel_ticks() const {
        if (mode == Metric::unweighted) return 1;
        return indel_cost.numerator() * (unit() / indel_cost.denominator());
    }

    std::int64_t substitution_ticks(char32_t a, char32_t b) const {
        if (a == b) return 0;
        if (mode == Metric::unweighted) return 1;
        const std::int64_t path = hierarchy->tree_distance(a, b);
        return path * substitution_scale.numerator() *
               (unit() / substitution_scale.denominator());
    }

    void check() const {
        if (mode == Metric::hierarchical && !hierarchy) {
            throw ConfigError("hierarchical metric requires a hierarchy");
        }
        if (substitution_scale <= 0 || indel_cost <= 0) {
            throw ConfigError("edit costs must be positive");
        }
    }
};

inline Rational substitution_weight(const WeightConfig& w, char32_t a, char32_t b) {
    w.check();
    return Rational(w.substitution_ticks(a, b), w.unit());
}

namespace detail {

// Two-row Levenshtein DP over pre-encoded symbols.
template <typename SubCost>
std::int64_t edit_ticks(const std::vector<std::uint32_t>& s, const std::vector<std::uint32_t>& t,
                        std::int64_t indel, SubCost&& sub, std::vector<std::int64_t>& prev,
                        std::vector<std::int64_t>& cur) {
    const std::size_t m = t.size();
    prev.resize(m + 1);
    cur.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<std::int64_t>(j) * indel;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        cur[0] = static_cast<std::int64_t>(i) * indel;
        const std::uint32_t si = s[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::int64_t del = prev[j] + indel;
            const std::int64_t ins = cur[j - 1] + indel;
            const std::int64_t rep = prev[j - 1] + sub(si, t[j - 1]);
            cur[j] = std::min({del, ins, rep});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

// Dense symbol table with a precomputed substitution cost matrix.
struct SymbolTable {
    std::vector<char32_t> symbols;
    std::unordered_map<char32_t, std::uint32_t> index;
    std::vector<std::int64_t> sub;  // symbols.size()^2

    SymbolTable(const WeightConfig& w, const std::vector<std::u32string>& items) {
        std::set<char32_t> chars;
        for (const auto& s : items) chars.insert(s.begin(), s.end());
        symbols.assign(chars.begin(), chars.end());
        for (std::uint32_t i = 0; i < symbols.size(); ++i) index[symbols[i]] = i;
        const std::size_t k = symbols.size();
        sub.assign(k * k, 0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                sub[a * k + b] = w.substitution_ticks(symbols[a], symbols[b]);
            }
        }
    }

    std::vector<std::uint32_t> encode(const std::u32string& s) const {
        std::vector<std::uint32_t> out;
        out.reserve(s.size());
        for (char32_t c : s) out.push_back(index.at(c));
        return out;
    }
};

}  // namespace detail

/// Weighted Levenshtein distance, exact.
inline Rational levenshtein(const WeightConfig& w, const std::u32string& s, const std::u32string& t) {
    w.check();
    const detail::SymbolTable table(w, {s, t});
    const std::size_t k = table.symbols.size();
    std::vector<std::int64_t> prev, cur;
    const std::int64_t ticks = detail::edit_ticks(
        table.encode(s), table.encode(t), w.indel_ticks(),
        [&](std::uint32_t a, std::uint32_t b) { return table.sub[a * k + b]; }, prev, cur);
    return Rational(ticks, w.unit());
}

inline Rational levenshtein(const WeightConfig& w, std::string_view s, std::string_view t) {
    return levenshtein(w, utf8::decode(s), utf8::decode(t));
}

/// Symmetric pairwise distances with a zero diagonal. Values are held as
/// integer multiples of `unit()`⁻¹.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::u32string> items, std::int64_t unit,
                   std::vector<std::int64_t> ticks)
        : items_(std::move(items)), unit_(unit), ticks_(std::move(ticks)) {}

    std::size_t size() const noexcept { return items_.size(); }
    const std::vector<std::u32string>& items() const noexcept { return items_; }
    std::int64_t unit() const noexcept { return unit_; }

    std::int64_t ticks(std::size_t i, std::size_t j) const { return ticks_[i * items_.size() + j]; }
    Rational value(std::size_t i, std::size_t j) const { return Rational(ticks(i, j), unit_); }
    double as_double(std::size_t i, std::size_t j) const {
        return static_cast<double>(ticks(i, j)) / static_cast<double>(unit_);
    }

    /// Restriction to the given item indices, in that order.
    DistanceMatrix subset(const std::vector<std::size_t>& keep) const {
        std::vector<std::u32string> items;
        items.reserve(keep.size());
        for (std::size_t i : keep) items.push_back(items_.at(i));
        std::vector<std::int64_t> t(keep.size() * keep.size());
        for (std::size_t a = 0; a < keep.size(); ++a) {
            for (std::size_t b = 0; b < keep.size(); ++b) t[a * keep.size() + b] = ticks(keep[a], keep[b]);
        }
        return {std::move(items), unit_, std::move(t)};
    }

    /// Every distance multiplied by a positive integer factor.
    DistanceMatrix scaled(std::int64_t factor) const {
        auto t = ticks_;
        for (auto& v : t) v *= factor;
        return {items_, unit_, std::move(t)};
    }

    void write_csv(std::ostream& out) const {
        out << "item";
        for (const auto& s : items_) out << ',' << csv_field(utf8::encode(s));
        out << '\n';
        for (std::size_t i = 0; i < size(); ++i) {
            out << csv_field(utf8::encode(items_[i]));
            for (std::size_t j = 0; j < size(); ++j) {
                const Rational v = value(i, j);
                out << ',' << v.numerator();
                if (v.denominator() != 1) out << '/' << v.denominator();
            }
            out << '\n';
        }
    }

    static std::string csv_field(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }

private:
    std::vector<std::u32string> items_;
    std::int64_t unit_ = 1;
    std::vector<std::int64_t> ticks_;
};

inline DistanceMatrix distance_matrix(const WeightConfig& w, const std::vector<std::u32string>& items,
                                      unsigned threads = 1) {
    w.check();
    {
        std::set<std::u32string> seen;
        for (const auto& s : items) {
            if (!seen.insert(s).second) {
                throw DuplicateItems("item \"" + utf8::encode(s) + "\" occurs more than once");
            }
        }
    }
    const detail::SymbolTable table(w, items);
    const std::size_t k = table.symbols.size();
    std::vector<std::vector<std::uint32_t>> encoded;
    encoded.reserve(items.size());
    for (const auto& s : items) encoded.push_back(table.encode(s));

    const std::size_t n = items.size();
    std::vector<std::int64_t> ticks(n * n, 0);
    const std::int64_t indel = w.indel_ticks();
    parallel_for(n, threads, [&](std::size_t i) {
        std::vector<std::int64_t> prev, cur;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::int64_t d = detail::edit_ticks(
                encoded[i], encoded[j], indel,
                [&](std::uint32_t a, std::uint32_t b) { return table.sub[a * k + b]; }, prev, cur);
            ticks[i * n + j] = d;
            ticks[j * n + i] = d;
        }
    });
    return {items, w.unit(), std::move(ticks)};
}

}  // namespace strout

#endif  // STROUT_STRDIST_HPP

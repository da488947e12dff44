#ifndef STROUT_EXPHARNESS_HPP
#define STROUT_EXPHARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "strout/errors.hpp"
#include "strout/hierarchy.hpp"
#include "strout/hilre_detect.hpp"
#include "strout/lof.hpp"
#include "strout/parallel.hpp"
#include "strout/rational.hpp"
#include "strout/strdist.hpp"
#include "strout/utf8.hpp"

namespace strout::exp {

using BigRational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Counter-based random numbers

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Draw i of a stream is a pure function of (seed, repetition, stream, i),
/// so repetitions can run in any order on any thread.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t repetition, std::uint64_t stream)
        : key_(splitmix64(splitmix64(splitmix64(seed) ^ repetition) ^ (stream * 0xd6e8feb86659fd93ULL))) {}

    std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    /// Uniform integer in [0, n), unbiased (multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ConfigError("empty range for a random draw");
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform integer in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    /// True with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Synthetic data

inline std::chrono::year_month_day parse_date(const std::string& iso) {
    unsigned y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(iso.c_str(), "%4u-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        throw ConfigError("expected a YYYY-MM-DD date, got \"" + iso + "\"");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw ConfigError("no such calendar date: " + iso);
    return ymd;
}

inline std::string format_date(std::chrono::year_month_day d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

/// n consecutive calendar days formatted YYYY-MM-DD.
inline std::vector<std::string> gen_dates(std::size_t n, std::chrono::year_month_day start) {
    if (n == 0) throw ConfigError("date count must be at least 1");
    if (!start.ok()) throw ConfigError("invalid start date");
    std::vector<std::string> out;
    out.reserve(n);
    const std::chrono::sys_days first{start};
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(format_date(std::chrono::year_month_day{first + std::chrono::days{static_cast<long>(i)}}));
    }
    return out;
}

/// The ten values injected into the synthetic date set.
inline std::vector<std::string> bad_dates() {
    return {"This is an outlier", "",           "22nd of April 2004", "30.09.2025", "01042024",
            "2012/01/01",         "0000-00-00", "2099-99-99",         "2000-01-01", "1999-12-31"};
}

namespace gen {

inline std::string digits(Stream& r, std::size_t len, bool leading_zero = true) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t lo = (i == 0 && !leading_zero) ? 1 : 0;
        s += static_cast<char>('0' + r.between(lo, 9));
    }
    return s;
}

inline std::string zip(Stream& r) { return digits(r, 5); }
inline std::string house_number(Stream& r) { return digits(r, r.between(1, 4), false); }
inline std::string phone_number(Stream& r) { return "0" + digits(r, r.between(7, 11)); }

inline std::string word(Stream& r, std::size_t lo, std::size_t hi) {
    static const char* vowels = "aeiou";
    static const char* consonants = "bcdfghklmnprstvwz";
    const std::size_t len = r.between(lo, hi);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        if (i % 2 == 1 || r.chance(1, 4)) {
            s += vowels[r.below(5)];
        } else {
            s += consonants[r.below(17)];
        }
        if (i + 1 < len && r.chance(1, 40)) s += "\xc3\xbc";  // ü
    }
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

/// County-like names: one capitalized word, sometimes with a second part.
inline std::string county(Stream& r) {
    std::string s = word(r, 3, 10);
    switch (r.below(10)) {
        case 0: s += " " + word(r, 3, 8); break;
        case 1: s += "-" + word(r, 3, 8); break;
        case 2: s += " (" + word(r, 3, 6) + ")"; break;
        case 3: s += " a.d. " + word(r, 3, 6); break;
        default: break;
    }
    return s;
}

}  // namespace gen

/// A value source: either a fixed list sampled without replacement, or a
/// generator whose draws are de-duplicated.
class Source {
public:
    enum class Kind { list, generator };

    static Source list(std::string name, std::vector<std::string> values) {
        Source s;
        s.name_ = std::move(name);
        s.kind_ = Kind::list;
        s.values_ = std::move(values);
        return s;
    }

    static Source generator(std::string name, std::string (*fn)(Stream&)) {
        Source s;
        s.name_ = std::move(name);
        s.kind_ = Kind::generator;
        s.fn_ = fn;
        return s;
    }

    /// "builtin:zip|county|house|phone|dates|bad-dates", otherwise a file with
    /// one value per line.
    static Source resolve(const std::string& spec) {
        if (spec == "builtin:zip") return generator(spec, gen::zip);
        if (spec == "builtin:county") return generator(spec, gen::county);
        if (spec == "builtin:house") return generator(spec, gen::house_number);
        if (spec == "builtin:phone") return generator(spec, gen::phone_number);
        if (spec == "builtin:dates") return list(spec, gen_dates(1000, parse_date("2020-01-01")));
        if (spec == "builtin:bad-dates") return list(spec, bad_dates());
        if (spec.rfind("builtin:", 0) == 0) throw ConfigError("unknown builtin source " + spec);
        return list(spec, read_lines(spec));
    }

    static std::vector<std::string> read_lines(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read " + path);
        std::vector<std::string> out;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            out.push_back(line);
        }
        return out;
    }

    const std::string& name() const noexcept { return name_; }
    Kind kind() const noexcept { return kind_; }

    /// Distinct values of a list source; generators have no fixed size.
    std::optional<std::size_t> distinct_count() const {
        if (kind_ != Kind::list) return std::nullopt;
        return std::set<std::string>(values_.begin(), values_.end()).size();
    }

    /// `count` distinct values.
    std::vector<std::string> draw(std::size_t count, Stream& r) const {
        if (kind_ == Kind::list) {
            std::vector<std::string> pool = values_;
            std::sort(pool.begin(), pool.end());
            pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
            if (count > pool.size()) {
                throw SourceTooSmall(name_ + " has " + std::to_string(pool.size()) + " distinct values, " +
                                     std::to_string(count) + " requested");
            }
            // Partial Fisher-Yates over a canonical (sorted) pool.
            for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + r.below(pool.size() - i)]);
            pool.resize(count);
            return pool;
        }
        std::vector<std::string> out;
        std::unordered_set<std::string> seen;
        const std::size_t budget = 100 * count + 1000;
        for (std::size_t attempt = 0; out.size() < count; ++attempt) {
            if (attempt >= budget) {
                throw SourceTooSmall(name_ + " could not produce " + std::to_string(count) + " distinct values");
            }
            std::string v = fn_(r);
            if (seen.insert(v).second) out.push_back(std::move(v));
        }
        return out;
    }

private:
    std::string name_;
    Kind kind_ = Kind::list;
    std::vector<std::string> values_;
    std::string (*fn_)(Stream&) = nullptr;
};

struct OutlierSource {
    std::string source;
    std::size_t k = 0;
};

struct DatasetSpec {
    std::string base;
    std::vector<OutlierSource> outliers;
    std::size_t n = 0;
    std::size_t repetitions = 100;
    std::uint64_t seed = 0;

    std::size_t outlier_total() const {
        std::size_t o = 0;
        for (const auto& s : outliers) o += s.k;
        return o;
    }

    void check() const {
        if (n == 0) throw ConfigError("dataset size n must be positive");
        if (repetitions == 0) throw ConfigError("repetitions must be positive");
        if (outlier_total() > n) throw ConfigError("more outliers than dataset entries");
    }
};

struct MixedDataset {
    std::vector<std::string> strings;
    std::vector<bool> truth;  // injected from an outlier source
    std::size_t dropped = 0;  // duplicates removed after mixing

    std::size_t injected() const { return static_cast<std::size_t>(std::count(truth.begin(), truth.end(), true)); }
};

/// Samples n base values, overwrites o uniformly chosen positions with the
/// outlier draws, then drops repeated strings (first occurrence wins).
inline MixedDataset mix_dataset(const DatasetSpec& spec, std::size_t repetition) {
    spec.check();
    enum : std::uint64_t { kBaseStream = 1, kPositionStream = 2, kOutlierStream = 16 };
    Stream base_rng(spec.seed, repetition, kBaseStream);
    std::vector<std::string> values = Source::resolve(spec.base).draw(spec.n, base_rng);
    std::vector<bool> truth(spec.n, false);

    const std::size_t o = spec.outlier_total();
    Stream pos_rng(spec.seed, repetition, kPositionStream);
    std::vector<std::size_t> positions(spec.n);
    std::iota(positions.begin(), positions.end(), 0);
    for (std::size_t i = 0; i < o; ++i) std::swap(positions[i], positions[i + pos_rng.below(spec.n - i)]);

    std::size_t next = 0;
    for (std::size_t s = 0; s < spec.outliers.size(); ++s) {
        Stream r(spec.seed, repetition, kOutlierStream + s);
        for (std::string& v : Source::resolve(spec.outliers[s].source).draw(spec.outliers[s].k, r)) {
            values[positions[next]] = std::move(v);
            truth[positions[next]] = true;
            ++next;
        }
    }

    MixedDataset out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!seen.insert(values[i]).second) {
            ++out.dropped;
            continue;
        }
        out.strings.push_back(std::move(values[i]));
        out.truth.push_back(truth[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

enum class Algorithm { hilre, lof_unweighted, lof_hierarchical };

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::hilre: return "hilre";
        case Algorithm::lof_unweighted: return "lof-unweighted";
        case Algorithm::lof_hierarchical: return "lof-hierarchical";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "hilre") return Algorithm::hilre;
    if (s == "lof-unweighted") return Algorithm::lof_unweighted;
    if (s == "lof-hierarchical") return Algorithm::lof_hierarchical;
    throw ConfigError("unknown algorithm \"" + s + "\"");
}

struct EvalRecord {
    Algorithm algorithm = Algorithm::hilre;
    Rational parameter;
    std::size_t repetition = 0;
    std::size_t n = 0;  // after de-duplication
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    Rational tpr, fpr_paper, fpr_standard;
};

inline Rational ratio(std::size_t num, std::size_t den) {
    return den == 0 ? Rational(0) : Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

/// Scores a detected set against the truth flags. With nothing injected the
/// true positive rate is reported as 0; with nothing detected fpr_paper
/// (false share of the detected set) is 0.
inline EvalRecord score(const MixedDataset& data, const std::set<std::string>& detected) {
    EvalRecord r;
    r.n = data.strings.size();
    for (std::size_t i = 0; i < data.strings.size(); ++i) {
        const bool flagged = detected.count(data.strings[i]) > 0;
        if (data.truth[i]) {
            flagged ? ++r.tp : ++r.fn;
        } else {
            flagged ? ++r.fp : ++r.tn;
        }
    }
    r.tpr = ratio(r.tp, r.tp + r.fn);
    r.fpr_paper = ratio(r.fp, r.tp + r.fp);
    r.fpr_standard = ratio(r.fp, r.fp + r.tn);
    return r;
}

struct AlgorithmConfig {
    Algorithm algorithm = Algorithm::hilre;
    std::shared_ptr<const Hierarchy> hierarchy;  // unset: date-default
    KPolicy k_policy;
    Rational substitution_scale{1, 4};
    std::size_t candidate_cap = 50000;
};

/// Default grids: factors 1.00..5.00 and p_min 0..1, both in steps of 1/20.
inline std::vector<Rational> default_grid(Algorithm a) {
    std::vector<Rational> g;
    if (a == Algorithm::hilre) {
        for (int i = 0; i <= 20; ++i) g.emplace_back(i, 20);
    } else {
        for (int i = 20; i <= 100; ++i) g.emplace_back(i, 20);
    }
    return g;
}

/// Runs one algorithm over one mixed dataset for every grid value.
inline std::vector<std::set<std::string>> detect_grid(const MixedDataset& data, const AlgorithmConfig& cfg,
                                                      const std::vector<Rational>& grid) {
    std::vector<std::u32string> items;
    items.reserve(data.strings.size());
    for (const auto& s : data.strings) items.push_back(utf8::decode(s));
    const Hierarchy base = cfg.hierarchy ? *cfg.hierarchy : date_default();
    const Hierarchy h = extend_alphabet(base, items);

    std::vector<std::set<std::string>> out;
    out.reserve(grid.size());
    if (cfg.algorithm == Algorithm::hilre) {
        const CandidateSet cs = get_all_hilres(items, h, {cfg.candidate_cap, 1});
        const auto gaps = match_gaps(cs, h);
        for (const Rational& p : grid) {
            const Detection d = outliers_for(cs, find_h_star(cs, gaps, p), h);
            std::set<std::string> flagged;
            for (const auto& s : d.outliers) flagged.insert(utf8::encode(s));
            out.push_back(std::move(flagged));
        }
        return out;
    }

    const WeightConfig w = cfg.algorithm == Algorithm::lof_unweighted
                               ? WeightConfig::unweighted()
                               : WeightConfig::hierarchical(h, cfg.substitution_scale);
    if (items.size() < 3) {
        throw DatasetTooSmall("need at least 3 unique items, got " + std::to_string(items.size()));
    }
    const DistanceMatrix m = distance_matrix(w, items);
    KPolicy policy = cfg.k_policy;
    if (policy.mode == KPolicy::Mode::kfcs_once) {
        // k does not depend on the factor; guess it once for the whole grid.
        const auto [lo, hi] = policy.search_range(m.size());
        policy = KPolicy::fixed_k(kfcs_guess(m, lo, hi, {cfg.k_policy.minimize, 1}).chosen_k);
    }
    for (const Rational& f : grid) {
        const ThresholdTrace t = iterative_threshold(m, f, policy);
        std::set<std::string> flagged;
        for (const auto& s : t.outliers) flagged.insert(utf8::encode(s));
        out.push_back(std::move(flagged));
    }
    return out;
}

struct SummaryRow {
    Algorithm algorithm = Algorithm::hilre;
    Rational parameter;
    std::size_t repetitions = 0;
    BigRational tpr, fpr_paper, fpr_standard;  // exact means
};

struct SweepResult {
    std::vector<EvalRecord> records;  // ordered by (parameter, repetition)
    std::vector<SummaryRow> summary;  // one row per parameter
};

inline std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records) {
    std::map<std::pair<int, Rational>, SummaryRow> rows;
    auto big = [](const Rational& r) { return BigRational(r.numerator()) / BigRational(r.denominator()); };
    for (const auto& r : records) {
        SummaryRow& s = rows[{static_cast<int>(r.algorithm), r.parameter}];
        s.algorithm = r.algorithm;
        s.parameter = r.parameter;
        ++s.repetitions;
        s.tpr += big(r.tpr);
        s.fpr_paper += big(r.fpr_paper);
        s.fpr_standard += big(r.fpr_standard);
    }
    std::vector<SummaryRow> out;
    for (auto& [key, s] : rows) {
        const BigRational reps(static_cast<long long>(s.repetitions));
        s.tpr /= reps;
        s.fpr_paper /= reps;
        s.fpr_standard /= reps;
        out.push_back(std::move(s));
    }
    return out;
}

/// Every (parameter, repetition) pair of one algorithm. Repetitions run in
/// parallel; the output order is fixed.
inline SweepResult run_sweep(const DatasetSpec& spec, const AlgorithmConfig& cfg, const std::vector<Rational>& grid,
                             unsigned threads = 1) {
    spec.check();
    if (grid.empty()) throw ConfigError("parameter grid is empty");
    std::vector<std::vector<EvalRecord>> per_rep(spec.repetitions);
    parallel_for(spec.repetitions, threads, [&](std::size_t rep) {
        const MixedDataset data = mix_dataset(spec, rep);
        const auto detected = detect_grid(data, cfg, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            EvalRecord r = score(data, detected[g]);
            r.algorithm = cfg.algorithm;
            r.parameter = grid[g];
            r.repetition = rep;
            per_rep[rep].push_back(r);
        }
    });
    SweepResult out;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t rep = 0; rep < spec.repetitions; ++rep) out.records.push_back(per_rep[rep][g]);
    }
    out.summary = summarize(out.records);
    return out;
}

// ---------------------------------------------------------------------------
// ROC

struct RocPoint {
    Algorithm algorithm = Algorithm::hilre;
    Rational parameter;
    BigRational fpr, tpr;
};

inline std::vector<RocPoint> roc_points(const std::vector<EvalRecord>& records, bool standard_fpr = false) {
    if (records.empty()) throw EmptyRecords("no records to summarize");
    std::vector<RocPoint> out;
    for (const auto& s : summarize(records)) {
        out.push_back({s.algorithm, s.parameter, standard_fpr ? s.fpr_standard : s.fpr_paper, s.tpr});
    }
    return out;
}

/// Index of the point furthest towards the top left (largest tpr - fpr);
/// ties go to the smaller parameter.
inline std::size_t pick_best(const std::vector<RocPoint>& points) {
    if (points.empty()) throw EmptyRecords("no ROC points");
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const BigRational a = points[i].tpr - points[i].fpr;
        const BigRational b = points[best].tpr - points[best].fpr;
        if (a > b || (a == b && points[i].parameter < points[best].parameter)) best = i;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Output

inline std::string exact(const BigRational& r) {
    std::string s = boost::multiprecision::numerator(r).str();
    if (boost::multiprecision::denominator(r) != 1) s += "/" + boost::multiprecision::denominator(r).str();
    return s;
}

inline std::string decimal(const BigRational& r, int places = 6) {
    using boost::multiprecision::cpp_int;
    cpp_int scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const BigRational scaled = r * BigRational(scale);
    // Round half away from zero.
    cpp_int q = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    const cpp_int rem = boost::multiprecision::numerator(scaled) % boost::multiprecision::denominator(scaled);
    if (2 * abs(rem) >= boost::multiprecision::denominator(scaled)) q += scaled < 0 ? -1 : 1;
    const bool neg = q < 0;
    std::string digits = (neg ? cpp_int(-q) : q).str();
    while (digits.size() <= static_cast<std::size_t>(places)) digits.insert(digits.begin(), '0');
    digits.insert(digits.end() - places, '.');
    return (neg ? "-" : "") + digits;
}

inline BigRational big(const Rational& r) { return BigRational(r.numerator()) / BigRational(r.denominator()); }

inline void write_records_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
    out << "algorithm,parameter,repetition,n,tp,fp,fn,tn,tpr,fpr_paper,fpr_standard\n";
    for (const auto& r : records) {
        out << to_string(r.algorithm) << ',' << strout::to_string(r.parameter) << ',' << r.repetition << ','
            << r.n << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.tn << ','
            << strout::to_string(r.tpr) << ',' << strout::to_string(r.fpr_paper) << ','
            << strout::to_string(r.fpr_standard) << '\n';
    }
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "algorithm,parameter,repetitions,tpr,fpr_paper,fpr_standard,tpr_exact,fpr_paper_exact,"
           "fpr_standard_exact\n";
    for (const auto& s : rows) {
        out << to_string(s.algorithm) << ',' << strout::to_string(s.parameter) << ',' << s.repetitions << ','
            << decimal(s.tpr) << ',' << decimal(s.fpr_paper) << ',' << decimal(s.fpr_standard) << ','
            << exact(s.tpr) << ',' << exact(s.fpr_paper) << ',' << exact(s.fpr_standard) << '\n';
    }
}

/// Points of one or more algorithms; `best` holds the chosen index per algorithm.
inline void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& points,
                          const std::set<std::size_t>& best) {
    out << "algorithm,parameter,fpr,tpr,best\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        out << to_string(p.algorithm) << ',' << strout::to_string(p.parameter) << ',' << decimal(p.fpr) << ','
            << decimal(p.tpr) << ',' << (best.count(i) ? 1 : 0) << '\n';
    }
}

inline void write_roc_svg(std::ostream& out, const std::vector<RocPoint>& points) {
    const int size = 400, pad = 40;
    const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3"};
    auto x = [&](const BigRational& v) { return pad + static_cast<double>(v) * (size - 2 * pad); };
    auto y = [&](const BigRational& v) { return size - pad - static_cast<double>(v) * (size - 2 * pad); };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size - 2 * pad << "\" height=\""
        << size - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << size - pad << "\" x2=\"" << size - pad << "\" y2=\"" << pad
        << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
    out << "<text x=\"" << size / 2 << "\" y=\"" << size - 10 << "\" text-anchor=\"middle\">false positive rate</text>\n";
    out << "<text x=\"12\" y=\"" << size / 2 << "\" transform=\"rotate(-90 12 " << size / 2
        << ")\" text-anchor=\"middle\">detected outlier rate</text>\n";
    std::set<int> seen;
    for (const auto& p : points) {
        const int a = static_cast<int>(p.algorithm);
        char buf[160];
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", x(p.fpr), y(p.tpr),
                      colors[a]);
        out << buf;
        if (seen.insert(a).second) {
            out << "<text x=\"" << pad + 5 << "\" y=\"" << pad + 15 * static_cast<int>(seen.size()) << "\" fill=\""
                << colors[a] << "\">" << to_string(p.algorithm) << "</text>\n";
        }
    }
    out << "</svg>\n";
}

/// 64-bit FNV-1a, used to fingerprint configurations in manifests.
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace strout::exp

#endif  // STROUT_EXPHARNESS_HPP

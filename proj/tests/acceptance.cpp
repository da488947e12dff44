// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "strout/strout.hpp"

#ifndef STROUT_CLI
#error "STROUT_CLI must name the strout executable"
#endif

using namespace strout;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

int failures = 0;

void report(int id, const char* title, Verdict v, Clock::time_point start, double budget_s) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > budget_s) {
        v.pass = false;
        v.notes.push_back("over time budget");
    }
    if (!v.pass) ++failures;
    std::printf("criterion %d: %s  %s (%.1fs / %.0fs)\n", id, v.pass ? "PASS" : "FAIL", title, secs, budget_s);
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
}

std::vector<std::u32string> dates(std::size_t n) {
    std::vector<std::u32string> out;
    for (const auto& s : exp::gen_dates(n, exp::parse_date("2020-01-01"))) out.push_back(utf8::decode(s));
    return out;
}

std::vector<std::u32string> bad_dates() {
    std::vector<std::u32string> out;
    for (const auto& s : exp::bad_dates()) out.push_back(utf8::decode(s));
    return out;
}

// The bad dates spread evenly over the clean set.
std::vector<std::u32string> modified(const std::vector<std::u32string>& clean) {
    auto out = clean;
    const auto t = bad_dates();
    for (std::size_t i = 0; i < t.size(); ++i) out[i * 97 + 13] = t[i];
    return out;
}

std::set<std::u32string> as_set(const std::vector<std::u32string>& v) { return {v.begin(), v.end()}; }

std::string show(const std::set<std::u32string>& s) {
    std::string out = "{";
    for (const auto& x : s) out += (out.size() > 1 ? ", \"" : "\"") + utf8::encode(x) + "\"";
    return out + "}";
}

void criterion1() {
    const auto t0 = Clock::now();
    Verdict v;
    const WeightConfig hier = WeightConfig::hierarchical(date_default(), {1, 4});
    const WeightConfig plain = WeightConfig::unweighted();
    struct Case {
        const char* a;
        const char* b;
        Rational hier, plain;
    };
    const Case cases[] = {{"2000-01-01", "1999-12-30", 4, 8},
                          {"2000-01-01", "200th time", Rational(37, 4), 7},
                          {"1999-12-30", "200th time", Rational(43, 4), 10}};
    for (const auto& c : cases) {
        const Rational h = levenshtein(hier, c.a, c.b);
        const Rational p = levenshtein(plain, c.a, c.b);
        v.check(h == c.hier, std::string("hierarchical ") + c.a + " / " + c.b + " = " + to_string(h));
        v.check(p == c.plain, std::string("unweighted ") + c.a + " / " + c.b + " = " + to_string(p));
    }
    // The reference totals add up a position-by-position substitution
    // alignment; the minimal script may be cheaper.
    for (const auto& c : cases) {
        const std::u32string a = utf8::decode(c.a), b = utf8::decode(c.b);
        Rational diagonal = 0;
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) diagonal += substitution_weight(hier, a[i], b[i]);
        v.note(std::string("info: substitution-only alignment ") + c.a + " / " + c.b + " costs " +
               to_string(diagonal) + ", minimal script " + to_string(levenshtein(hier, c.a, c.b)));
    }
    report(1, "weighted-metric golden values", v, t0, 1);
}

void criterion2() {
    const auto t0 = Clock::now();
    Verdict v;
    const auto clean = dates(1000);
    const auto mod = modified(clean);
    const Rational p85(85, 100);
    for (const auto* data : {&clean, &mod}) {
        const char* name = data == &clean ? "clean" : "modified";
        const Hierarchy h = extend_alphabet(date_default(), *data);
        const CandidateSet cs = get_all_hilres(*data, h, {50000, threads()});
        const auto gaps = match_gaps(cs, h, threads());
        const Detection d0 = outliers_for(cs, find_h_star(cs, gaps, 0), h);
        const Detection d85 = outliers_for(cs, find_h_star(cs, gaps, p85), h);
        v.note(std::string(name) + ": " + std::to_string(cs.size()) + " candidates, H*(0) = " +
               d0.h_star.rendering + ", H*(0.85) = " + d85.h_star.rendering);
        v.check(d0.h_star.rendering == "202[0-9]-0[0-9]-[0-9]{2}", std::string(name) + " p_min=0 rendering");
        v.check(d85.h_star.rendering == "202[0-9]-[0-9]{2}-[0-9]{2}", std::string(name) + " p_min=0.85 rendering");
        if (data == &mod) {
            v.check(as_set(d85.outliers) == as_set(bad_dates()),
                    "modified outliers at p_min=0.85 = " + show(as_set(d85.outliers)));
        }
    }
    report(2, "HiLRE on the 1000-date sets", v, t0, 120);
}

void criterion3() {
    const auto t0 = Clock::now();
    Verdict v;
    const auto clean = dates(1000);
    const auto mod = modified(clean);
    const auto truth = as_set(bad_dates());
    for (Metric metric : {Metric::unweighted, Metric::hierarchical}) {
        for (const auto* data : {&clean, &mod}) {
            const std::string name = std::string(to_string(metric)) + (data == &clean ? " clean" : " modified");
            const WeightConfig w = metric == Metric::unweighted
                                       ? WeightConfig::unweighted()
                                       : WeightConfig::hierarchical(extend_alphabet(date_default(), *data));
            const DistanceMatrix m = distance_matrix(w, *data, threads());
            // k is guessed once on the full set and reused for every factor.
            const KPolicy guess;
            const auto [lo, hi] = guess.search_range(m.size());
            const std::size_t k = kfcs_guess(m, lo, hi, {false, threads()}).chosen_k;
            std::string line = name + ": k=" + std::to_string(k);
            std::set<std::u32string> previous;
            bool first = true;
            const std::vector<Rational> factors =
                data == &clean ? std::vector<Rational>{2, 3, 5} : std::vector<Rational>{Rational(3, 2), 2, 3, 5};
            for (const Rational& f : factors) {
                const auto found = as_set(iterative_threshold(m, f, KPolicy::fixed_k(k), {threads()}).outliers);
                line += ", f=" + to_string(f) + ": " + std::to_string(found.size());
                if (data == &clean) {
                    v.check(found.empty(), name + " f=" + to_string(f) + " flags " + show(found));
                    continue;
                }
                if (f == Rational(3, 2)) {
                    v.check(found == truth, name + " f=3/2 flags " + show(found));
                } else {
                    bool subset = std::includes(truth.begin(), truth.end(), found.begin(), found.end());
                    v.check(subset, name + " f=" + to_string(f) + " has false positives " + show(found));
                }
                if (!first) {
                    bool shrinks = std::includes(previous.begin(), previous.end(), found.begin(), found.end());
                    v.check(shrinks, name + " f=" + to_string(f) + " is not contained in the previous factor's set");
                }
                previous = found;
                first = false;
            }
            v.note(line);
        }
    }
    report(3, "LOF on the 1000-date sets", v, t0, 300);
}

void criterion4() {
    const auto t0 = Clock::now();
    Verdict v;
    const std::vector<std::u32string> data{U"a", U"b", U"c", U"0"};
    const Hierarchy h = date_default();
    const CandidateSet cs = get_all_hilres(data, h);
    std::set<std::string> got;
    for (const auto& c : cs.candidates) got.insert(c.rendering);
    const std::set<std::string> want{"∅", "a", "b", "c", "0", "[a-z]", "[0-9]", "[a-zA-Z0-9]"};
    std::string missing, extra;
    for (const auto& s : want) {
        if (!got.count(s)) missing += " " + s;
    }
    for (const auto& s : got) {
        if (!want.count(s)) extra += " " + s;
    }
    v.check(missing.empty() && extra.empty(), "candidate set; missing:" + (missing.empty() ? " none" : missing) +
                                                  ", extra:" + (extra.empty() ? " none" : extra));
    const Detection d = outliers_for(cs, find_h_star(cs, h, 0), h);
    v.check(d.h_star.rendering == "[a-z]", "H* = " + d.h_star.rendering);
    v.check(as_set(d.outliers) == std::set<std::u32string>{U"0"}, "outliers = " + show(as_set(d.outliers)));
    report(4, "four-string worked example", v, t0, 1);
}

void criterion5() {
    const auto t0 = Clock::now();
    Verdict v;
    std::vector<std::u32string> data(10, U"2020-01-01");
    for (const auto& s : exp::gen_dates(9, exp::parse_date("2020-01-02"))) data.push_back(utf8::decode(s));
    data.push_back(U"This is an outlier");
    const Hierarchy h = extend_alphabet(date_default(), data);
    const CandidateSet cs = get_all_hilres(data, h);
    const auto gaps = match_gaps(cs, h);
    const Detection d75 = outliers_for(cs, find_h_star(cs, gaps, Rational(3, 4)), h);
    const Detection d95 = outliers_for(cs, find_h_star(cs, gaps, Rational(95, 100)), h);
    v.check(d75.h_star.rendering == "2020-01-0[0-9]", "p_min=0.75 H* = " + d75.h_star.rendering);
    v.check(d95.h_star.rendering == "2020-01-[0-9]{2}", "p_min=0.95 H* = " + d95.h_star.rendering);
    v.check(as_set(d95.outliers) == std::set<std::u32string>{U"This is an outlier"},
            "p_min=0.95 outliers = " + show(as_set(d95.outliers)));
    report(5, "p_min worked example", v, t0, 1);
}

void criterion6() {
    const auto t0 = Clock::now();
    Verdict v;
    std::mt19937_64 rng(20240601);
    std::size_t lof_bad = 0, kfcs_bad = 0, lof_checks = 0;
    for (int run = 0; run < 200; ++run) {
        const std::size_t n = 3 + rng() % 10;
        const auto items = oracle::random_items(rng, n);
        const WeightConfig w = run % 2 ? WeightConfig::unweighted()
                                       : WeightConfig::hierarchical(extend_alphabet(date_default(), items));
        const DistanceMatrix m = distance_matrix(w, items);
        const auto d = oracle::matrix(w, items);
        std::vector<double> c(n);
        for (std::size_t k = 1; k < n; ++k) {
            const auto want = oracle::lof(d, k);
            const auto got = lof_scores<oracle::Exact>(m, k);
            ++lof_checks;
            for (std::size_t p = 0; p < n; ++p) {
                if (oracle::exact(got.kdist[p]) != want.kdist[p] || got.lrd[p] != want.lrd[p] ||
                    got.lof[p] != want.lof[p]) {
                    ++lof_bad;
                    break;
                }
            }
            c[k] = oracle::consistency(want, k);
        }
        const KfcsResult g = kfcs_guess(m, 1, n - 1);
        std::size_t best = 1;
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs(g.consistency.at(k) - c[k]) > 1e-9) ++kfcs_bad;
            if (c[k] > c[best]) best = k;
        }
        if (g.chosen_k != best && std::abs(c[g.chosen_k] - c[best]) > 1e-9) ++kfcs_bad;
    }
    v.check(lof_bad == 0, std::to_string(lof_bad) + " LOF mismatches");
    v.check(kfcs_bad == 0, std::to_string(kfcs_bad) + " KFCS mismatches");
    v.note("LOF oracle: " + std::to_string(lof_checks) + " (dataset, k) pairs");

    const Hierarchy h = oracle::abc();
    const auto strings = oracle::all_strings(U"abc", 6);
    std::size_t violations = 0, included = 0;
    for (int pair = 0; pair < 500; ++pair) {
        const Hilre h1 = oracle::random_wellformed(rng, h);
        Hilre h2 = oracle::random_wellformed(rng, h);
        if (pair % 2) {
            // Bias towards related pairs so inclusion actually occurs.
            std::vector<std::u32string> sample;
            const auto re1 = oracle::as_regex(h1, h);
            for (const auto& s : strings) {
                if (sample.size() < 3 && oracle::brute_match(re1, s) && rng() % 4 == 0) sample.push_back(s);
            }
            sample.push_back(strings[rng() % strings.size()]);
            h2 = hilre_generalize(sample, h);
        }
        if (!subseteq(h1, h2, h)) continue;
        ++included;
        const auto re1 = oracle::as_regex(h1, h);
        const auto re2 = oracle::as_regex(h2, h);
        for (const auto& s : strings) {
            if (oracle::brute_match(re1, s) && !oracle::brute_match(re2, s)) {
                ++violations;
                break;
            }
        }
    }
    v.check(violations == 0, std::to_string(violations) + " inclusion violations");
    v.note("inclusion: 500 pairs, " + std::to_string(included) + " reported as included");

    std::size_t disagreements = 0;
    for (int e = 0; e < 500; ++e) {
        const Hilre r = oracle::random_wellformed(rng, h);
        const auto re = oracle::as_regex(r, h);
        for (const auto& s : strings) {
            if (matches(r, s, h) != oracle::brute_match(re, s)) ++disagreements;
        }
    }
    v.check(disagreements == 0, std::to_string(disagreements) + " match disagreements");
    report(6, "oracle suites", v, t0, 600);
}

exp::DatasetSpec mixed_spec() {
    exp::DatasetSpec spec;
    spec.base = "builtin:zip";
    spec.outliers = {{"builtin:county", 10}};
    spec.n = 200;
    spec.repetitions = 20;
    spec.seed = 7;
    return spec;
}

std::vector<exp::EvalRecord> run_mixed(bool minimize, std::vector<exp::RocPoint>& best) {
    std::vector<exp::EvalRecord> all;
    for (exp::Algorithm a : {exp::Algorithm::hilre, exp::Algorithm::lof_unweighted, exp::Algorithm::lof_hierarchical}) {
        exp::AlgorithmConfig cfg;
        cfg.algorithm = a;
        cfg.k_policy.minimize = minimize;
        const auto res = exp::run_sweep(mixed_spec(), cfg, exp::default_grid(a), threads());
        const auto pts = exp::roc_points(res.records);
        best.push_back(pts[exp::pick_best(pts)]);
        all.insert(all.end(), res.records.begin(), res.records.end());
    }
    return all;
}

std::string point(const exp::RocPoint& p) {
    return exp::to_string(p.algorithm) + " best f=" + to_string(p.parameter) + " tpr=" + exp::decimal(p.tpr, 4) +
           " fpr=" + exp::decimal(p.fpr, 4);
}

std::string records_csv;

void criterion7() {
    const auto t0 = Clock::now();
    Verdict v;
    std::vector<exp::RocPoint> best;
    const auto records = run_mixed(false, best);
    std::ostringstream csv;
    exp::write_records_csv(csv, records);
    records_csv = csv.str();
    for (const auto& p : best) {
        v.note(point(p));
        if (p.algorithm == exp::Algorithm::hilre) {
            v.check(p.tpr == 1 && p.fpr == 0, "HiLRE best point is not tpr=1, fpr=0");
        } else {
            v.check(p.tpr >= exp::BigRational(3, 5) && p.fpr <= exp::BigRational(1, 5),
                    exp::to_string(p.algorithm) + " best point misses tpr >= 0.6, fpr <= 0.2");
        }
    }
    report(7, "mixed zip/county experiment", v, t0, 180);

    // Not a verdict: the same sweep with the opposite KFCS convention.
    std::vector<exp::RocPoint> alt;
    const auto t1 = Clock::now();
    run_mixed(true, alt);
    std::printf("    info: with --kfcs-minimize (%.1fs):\n", std::chrono::duration<double>(Clock::now() - t1).count());
    for (const auto& p : alt) {
        if (p.algorithm != exp::Algorithm::hilre) std::printf("      %s\n", point(p).c_str());
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion8() {
    const auto t0 = Clock::now();
    Verdict v;
    const fs::path root = fs::temp_directory_path() / ("strout-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(root);
    std::vector<std::string> outputs;
    for (int t : {1, 2}) {
        const fs::path dir = root / ("threads" + std::to_string(t));
        const std::string cmd = std::string(STROUT_CLI) + " --threads " + std::to_string(t) +
                                " sweep --base zip --outlier county:10 --n 200 --repetitions 20 --seed 7 --out " +
                                dir.string() + " > " + (root / "stdout.json").string() + " 2> " +
                                (root / "stderr.txt").string();
        const int rc = std::system(cmd.c_str());
        v.check(rc == 0, "strout sweep with --threads " + std::to_string(t) + " exited with " + std::to_string(rc));
        outputs.push_back(slurp(dir / "records.csv"));
    }
    v.check(!outputs[0].empty() && outputs[0] == outputs[1], "records.csv differs between --threads 1 and 2");
    v.check(outputs[0] == records_csv, "CLI records.csv differs from the in-process sweep");
    v.note("records.csv: " + std::to_string(outputs[0].size()) + " bytes, fnv1a " + exp::fnv1a_hex(outputs[0]));
    fs::remove_all(root);
    report(8, "determinism across thread counts", v, t0, 600);
}

}  // namespace

int main() {
    std::printf("strout %s acceptance, %u thread(s)\n", kVersion, threads());
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}

// strout: command-line front end.
//
// stdout carries JSON (or the generated dataset for `synth` without
// --output); diagnostics go to stderr. Exit status: 0 ok, 1 data error,
// 2 usage error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "strout/strout.hpp"

namespace {

using json = nlohmann::json;
using namespace strout;

std::string iso_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// One datum per line; an empty line is the empty string.
std::vector<std::string> read_lines(const std::string& path) {
    if (path == "-") {
        std::vector<std::string> out;
        std::string line;
        while (std::getline(std::cin, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            out.push_back(line);
        }
        return out;
    }
    return exp::Source::read_lines(path);
}

std::vector<std::u32string> decode_lines(const std::vector<std::string>& lines) {
    std::vector<std::u32string> out;
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            out.push_back(utf8::decode(lines[i]));
        } catch (const Error& e) {
            throw ConfigError("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

Rational rational_arg(const std::string& text, const std::string& flag) {
    try {
        return parse_rational(text);
    } catch (const Error&) {
        throw UsageError(flag + " expects a number such as 1.5 or 3/2, got \"" + text + "\"");
    }
}

json rational_json(const Rational& r) { return strout::to_string(r); }

json u32_list(const std::vector<std::u32string>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(utf8::encode(s));
    return a;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

// Hierarchy plus the dataset's unknown characters, or an error naming the
// first offending line when the alphabet is strict.
Hierarchy hierarchy_for(const std::string& spec, const std::vector<std::u32string>& data, bool strict) {
    Hierarchy h = load_hierarchy(spec);
    if (!strict) return extend_alphabet(h, data);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (char32_t c : data[i]) {
            if (!h.knows(c)) {
                throw UnknownCharacter("line " + std::to_string(i + 1) + " (\"" + utf8::encode(data[i]) +
                                       "\"): character '" + utf8::encode(c) + "' is not in the hierarchy");
            }
        }
    }
    return h;
}

struct Global {
    unsigned threads = 1;
    std::string manifest;
    std::string config;
    std::vector<std::string> argv;
};

json manifest_base(const Global& g, const json& settings, const std::string& started) {
    json m;
    m["tool"] = "strout";
    m["version"] = kVersion;
    m["command"] = g.argv;
    m["settings"] = settings;
    m["config_hash"] = exp::fnv1a_hex(settings.dump());
    m["started"] = started;
    m["finished"] = iso_now();
    return m;
}

void maybe_manifest(const Global& g, const json& settings, const std::string& started,
                    const std::vector<std::string>& outputs) {
    if (g.manifest.empty()) return;
    json m = manifest_base(g, settings, started);
    m["outputs"] = outputs;
    write_file(g.manifest, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct LofArgs {
    std::string input;
    std::string metric = "unweighted";
    std::string hierarchy = "date-default";
    std::string factor = "1.5";
    std::string scale = "1/4";
    std::string indel = "1";
    std::size_t k = 0;
    std::string kfcs_range;
    bool kfcs_full = false;
    bool kfcs_minimize = false;
    bool reguess_k = false;
    bool strict_alphabet = false;
    std::string scores;
    std::string dump_distances;
};

KPolicy k_policy(std::size_t k, const std::string& range, bool full, bool minimize, bool reguess) {
    KPolicy p;
    if (k > 0) {
        p = KPolicy::fixed_k(k);
        return p;
    }
    p.mode = reguess ? KPolicy::Mode::kfcs_each_round : KPolicy::Mode::kfcs_once;
    p.full_range = full;
    p.minimize = minimize;
    if (!range.empty()) {
        const auto dots = range.find("..");
        try {
            if (dots == std::string::npos) throw std::invalid_argument(range);
            p.range = {std::stoul(range.substr(0, dots)), std::stoul(range.substr(dots + 2))};
        } catch (const std::exception&) {
            throw UsageError("--kfcs-range expects a..b, got \"" + range + "\"");
        }
    }
    return p;
}

int cmd_lof(const Global& g, const LofArgs& a) {
    const std::string started = iso_now();
    const Rational factor = rational_arg(a.factor, "--factor");
    const Rational scale = rational_arg(a.scale, "--scale");
    const Rational indel = rational_arg(a.indel, "--indel");
    if (scale <= 0 || indel <= 0) throw UsageError("--scale and --indel must be positive");
    if (a.metric != "unweighted" && a.metric != "hierarchical") {
        throw UsageError("--metric must be unweighted or hierarchical");
    }
    const auto raw = decode_lines(read_lines(a.input));
    std::vector<std::u32string> items;
    std::set<std::u32string> seen;
    for (const auto& s : raw) {
        if (seen.insert(s).second) items.push_back(s);
    }
    if (items.size() < 3) {
        throw DatasetTooSmall("need at least 3 unique items, got " + std::to_string(items.size()));
    }
    const WeightConfig w = a.metric == "unweighted"
                               ? WeightConfig::unweighted()
                               : WeightConfig::hierarchical(hierarchy_for(a.hierarchy, items, a.strict_alphabet),
                                                            scale, indel);
    const DistanceMatrix m = distance_matrix(w, items, g.threads);
    const KPolicy policy = k_policy(a.k, a.kfcs_range, a.kfcs_full, a.kfcs_minimize, a.reguess_k);
    const ThresholdTrace t = iterative_threshold(m, factor, policy, {g.threads});

    json out;
    out["metric"] = a.metric;
    out["factor"] = rational_json(factor);
    out["items"] = items.size();
    out["duplicates_removed"] = raw.size() - items.size();
    out["k"] = t.rounds.empty() ? policy.k : t.rounds.front().k;
    if (t.kfcs) {
        json c = json::object();
        for (const auto& [k, v] : t.kfcs->consistency) c[std::to_string(k)] = v;
        out["kfcs"] = {{"chosen_k", t.kfcs->chosen_k}, {"consistency", c}};
    }
    json rounds = json::array();
    for (const auto& r : t.rounds) {
        rounds.push_back({{"k", r.k},
                          {"working_size", r.working_size},
                          {"mean", r.mean},
                          {"threshold", r.threshold},
                          {"flagged", u32_list(r.flagged)}});
    }
    out["rounds"] = rounds;
    out["outliers"] = u32_list(t.outliers);
    json scores = json::array();
    const auto& st = t.first_scores;
    for (std::size_t i = 0; i < st.items.size(); ++i) {
        scores.push_back({{"item", utf8::encode(st.items[i])},
                          {"k_distance", rational_json(st.kdist[i])},
                          {"lrd", st.lrd[i]},
                          {"lof", st.lof[i]}});
    }
    out["scores"] = scores;

    std::vector<std::string> outputs;
    if (!a.scores.empty()) {
        std::ostringstream csv;
        csv << "item,k_distance,lrd,lof\n";
        char buf[64];
        for (std::size_t i = 0; i < st.items.size(); ++i) {
            csv << DistanceMatrix::csv_field(utf8::encode(st.items[i])) << ',' << strout::to_string(st.kdist[i]);
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", st.lrd[i], st.lof[i]);
            csv << buf;
        }
        write_file(a.scores, csv.str());
        outputs.push_back(a.scores);
    }
    if (!a.dump_distances.empty()) {
        std::ostringstream csv;
        m.write_csv(csv);
        write_file(a.dump_distances, csv.str());
        outputs.push_back(a.dump_distances);
    }
    std::cout << out.dump(2) << '\n';
    const json settings = {{"command", "lof"},       {"input", a.input},          {"metric", a.metric},
                           {"hierarchy", a.hierarchy}, {"factor", a.factor},      {"scale", a.scale},
                           {"indel", a.indel},         {"k", a.k},               {"kfcs_range", a.kfcs_range}, {"kfcs_full", a.kfcs_full},
                           {"kfcs_minimize", a.kfcs_minimize}, {"reguess_k", a.reguess_k}};
    maybe_manifest(g, settings, started, outputs);
    return 0;
}

// ---------------------------------------------------------------------------

struct HilreArgs {
    std::string input;
    std::string hierarchy = "date-default";
    std::string pmin = "0";
    std::string dump_candidates;
    std::size_t cap = 50000;
    bool strict_alphabet = false;
};

int cmd_hilre_detect(const Global& g, const HilreArgs& a) {
    const std::string started = iso_now();
    const Rational p_min = rational_arg(a.pmin, "--pmin");
    if (p_min < 0 || p_min > 1) throw UsageError("--pmin must lie in [0, 1]");
    const auto data = decode_lines(read_lines(a.input));
    if (data.empty()) throw EmptyDataset("input has no lines");
    const Hierarchy h = hierarchy_for(a.hierarchy, data, a.strict_alphabet);
    const CandidateSet cs = get_all_hilres(data, h, {a.cap, g.threads});
    const auto gaps = match_gaps(cs, h, g.threads);
    const Detection d = outliers_for(cs, find_h_star(cs, gaps, p_min), h);
    if (d.degenerate) std::cerr << "warning: no candidate qualified; every string is reported as an outlier\n";

    json out;
    out["h_star"] = d.h_star.rendering;
    out["match_count"] = d.h_star.match_count;
    out["gap"] = d.h_star.gap;
    out["dataset_size"] = cs.total;
    out["pmin"] = rational_json(p_min);
    out["outliers"] = u32_list(d.outliers);
    out["candidate_count"] = d.candidate_count;
    out["degenerate"] = d.degenerate;

    std::vector<std::string> outputs;
    if (!a.dump_candidates.empty()) {
        std::ostringstream csv;
        csv << "rendering,match_count,gap\n";
        for (std::size_t i = 0; i < cs.size(); ++i) {
            csv << DistanceMatrix::csv_field(cs.candidates[i].rendering) << ',' << cs.candidates[i].match_count
                << ',' << gaps[i] << '\n';
        }
        write_file(a.dump_candidates, csv.str());
        outputs.push_back(a.dump_candidates);
    }
    std::cout << out.dump(2) << '\n';
    maybe_manifest(g,
                   {{"command", "hilre-detect"}, {"input", a.input}, {"hierarchy", a.hierarchy},
                    {"pmin", a.pmin}, {"cap", a.cap}},
                   started, outputs);
    return 0;
}

struct InferArgs {
    std::string input;
    std::string hierarchy = "date-default";
    bool strict_alphabet = false;
};

int cmd_infer(const Global& g, const InferArgs& a) {
    const std::string started = iso_now();
    const auto data = decode_lines(read_lines(a.input));
    if (data.empty()) throw EmptyDataset("input has no lines");
    const Hierarchy h = hierarchy_for(a.hierarchy, data, a.strict_alphabet);
    const Hilre r = hilre_generalize(data, h);
    std::cout << json{{"hilre", render(r, h)}, {"strings", data.size()}}.dump(2) << '\n';
    maybe_manifest(g, {{"command", "infer"}, {"input", a.input}, {"hierarchy", a.hierarchy}}, started, {});
    return 0;
}

struct MatchArgs {
    std::string regex;
    std::string input = "-";
    std::string hierarchy = "date-default";
};

int cmd_match(const Global& g, const MatchArgs& a) {
    const std::string started = iso_now();
    const Hierarchy h = load_hierarchy(a.hierarchy);
    const Hilre r = parse_hilre(a.regex, h);
    const auto data = decode_lines(read_lines(a.input));
    std::vector<std::u32string> hit, miss;
    for (const auto& s : data) (matches(r, s, h) ? hit : miss).push_back(s);
    std::cout << json{{"regex", render(r, h)}, {"matched", u32_list(hit)}, {"rejected", u32_list(miss)}}.dump(2)
              << '\n';
    maybe_manifest(g, {{"command", "match"}, {"regex", a.regex}, {"input", a.input}, {"hierarchy", a.hierarchy}},
                   started, {});
    return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::size_t dates = 0;
    std::string start = "2020-01-01";
    std::string generator;
    std::size_t count = 0;
    std::string inject;
    std::size_t inject_count = 0;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string truth;
};

exp::Source source_arg(const std::string& s) {
    if (s.find(':') == std::string::npos && !std::filesystem::exists(s)) return exp::Source::resolve("builtin:" + s);
    return exp::Source::resolve(s);
}

int cmd_synth(const Global& g, const SynthArgs& a) {
    const std::string started = iso_now();
    if ((a.dates > 0) == !a.generator.empty()) throw UsageError("give exactly one of --dates or --generator");
    const bool random = !a.generator.empty() || !a.inject.empty();
    if (random && !a.seed) throw UsageError("--seed is required for randomized output");
    const std::uint64_t seed = a.seed.value_or(0);

    std::vector<std::string> values;
    if (a.dates > 0) {
        values = exp::gen_dates(a.dates, exp::parse_date(a.start));
    } else {
        if (a.count == 0) throw UsageError("--generator needs --count");
        exp::Stream r(seed, 0, 1);
        values = source_arg(a.generator).draw(a.count, r);
    }
    std::vector<bool> injected(values.size(), false);
    if (!a.inject.empty()) {
        const exp::Source src = source_arg(a.inject);
        std::size_t k = a.inject_count;
        if (k == 0) {
            const auto d = src.distinct_count();
            if (!d) throw UsageError("--inject from a generator needs --inject-count");
            k = *d;
        }
        if (k > values.size()) throw UsageError("more injected values than dataset lines");
        exp::Stream pos(seed, 0, 2), draw(seed, 0, 3);
        std::vector<std::size_t> idx(values.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + pos.below(idx.size() - i)]);
        const auto drawn = src.draw(k, draw);
        for (std::size_t i = 0; i < k; ++i) {
            values[idx[i]] = drawn[i];
            injected[idx[i]] = true;
        }
    }

    std::ostringstream text;
    for (const auto& v : values) text << v << '\n';
    std::vector<std::string> outputs;
    if (a.output.empty()) {
        std::cout << text.str();
    } else {
        write_file(a.output, text.str());
        outputs.push_back(a.output);
        json inj = json::array();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (injected[i]) inj.push_back({{"line", i + 1}, {"value", values[i]}});
        }
        std::cout << json{{"output", a.output}, {"lines", values.size()}, {"injected", inj}}.dump(2) << '\n';
    }
    if (!a.truth.empty()) {
        std::ostringstream csv;
        csv << "line,value,injected\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            csv << i + 1 << ',' << DistanceMatrix::csv_field(values[i]) << ',' << (injected[i] ? 1 : 0) << '\n';
        }
        write_file(a.truth, csv.str());
        outputs.push_back(a.truth);
    }
    json settings = {{"command", "synth"}, {"dates", a.dates},   {"start", a.start},
                     {"generator", a.generator}, {"count", a.count}, {"inject", a.inject},
                     {"inject_count", a.inject_count}};
    if (a.seed) settings["seed"] = *a.seed;
    maybe_manifest(g, settings, started, outputs);
    return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string base = "builtin:zip";
    std::vector<std::string> outliers;
    std::size_t n = 200;
    std::size_t repetitions = 100;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> algorithms;
    std::string lof_grid;
    std::string hilre_grid;
    std::string hierarchy = "date-default";
    std::string out;
    std::string scale = "1/4";
    std::string kfcs_range;
    bool kfcs_full = false;
    bool kfcs_minimize = false;
    bool reguess_k = false;
    bool standard_fpr = false;
    std::size_t cap = 50000;
};

std::vector<Rational> grid_arg(const std::string& text, const std::string& flag) {
    std::vector<Rational> g;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) g.push_back(rational_arg(item, flag));
    if (g.empty()) throw UsageError(flag + " is empty");
    return g;
}

std::string with_builtin(const std::string& s) {
    if (s.find(':') == std::string::npos && !std::filesystem::exists(s)) return "builtin:" + s;
    return s;
}

int cmd_sweep(const Global& g, const SweepArgs& a) {
    const std::string started = iso_now();
    if (!a.seed) throw UsageError("--seed is required");
    exp::DatasetSpec spec;
    spec.base = with_builtin(a.base);
    spec.n = a.n;
    spec.repetitions = a.repetitions;
    spec.seed = *a.seed;
    for (const auto& o : a.outliers) {
        const auto colon = o.rfind(':');
        if (colon == std::string::npos) throw UsageError("--outlier expects SOURCE:K, got \"" + o + "\"");
        std::size_t k = 0;
        try {
            k = std::stoul(o.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("--outlier count is not a number in \"" + o + "\"");
        }
        if (k == 0) throw UsageError("--outlier count must be at least 1");
        spec.outliers.push_back({with_builtin(o.substr(0, colon)), k});
    }
    try {
        spec.check();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }

    std::vector<exp::Algorithm> algos;
    for (const auto& s : a.algorithms) {
        try {
            algos.push_back(exp::parse_algorithm(s));
        } catch (const ConfigError& e) {
            throw UsageError(e.what());
        }
    }
    if (algos.empty()) algos = {exp::Algorithm::hilre, exp::Algorithm::lof_unweighted, exp::Algorithm::lof_hierarchical};
    if (a.out.empty()) throw UsageError("--out is required");
    std::filesystem::create_directories(a.out);

    const auto hierarchy = std::make_shared<const Hierarchy>(load_hierarchy(a.hierarchy));
    const Rational scale = rational_arg(a.scale, "--scale");
    std::vector<exp::EvalRecord> records;
    std::vector<exp::RocPoint> points;
    std::set<std::size_t> best;
    json best_json = json::object();
    for (exp::Algorithm alg : algos) {
        exp::AlgorithmConfig cfg;
        cfg.algorithm = alg;
        cfg.hierarchy = hierarchy;
        cfg.substitution_scale = scale;
        cfg.candidate_cap = a.cap;
        cfg.k_policy = k_policy(0, a.kfcs_range, a.kfcs_full, a.kfcs_minimize, a.reguess_k);
        std::vector<Rational> grid = exp::default_grid(alg);
        if (alg == exp::Algorithm::hilre && !a.hilre_grid.empty()) grid = grid_arg(a.hilre_grid, "--hilre-grid");
        if (alg != exp::Algorithm::hilre && !a.lof_grid.empty()) grid = grid_arg(a.lof_grid, "--lof-grid");
        std::cerr << "running " << exp::to_string(alg) << " (" << grid.size() << " parameters x "
                  << spec.repetitions << " repetitions)\n";
        const exp::SweepResult res = exp::run_sweep(spec, cfg, grid, g.threads);
        records.insert(records.end(), res.records.begin(), res.records.end());
        const auto pts = exp::roc_points(res.records, a.standard_fpr);
        const std::size_t b = exp::pick_best(pts);
        best.insert(points.size() + b);
        best_json[exp::to_string(alg)] = {{"parameter", rational_json(pts[b].parameter)},
                                          {"fpr", exp::decimal(pts[b].fpr)},
                                          {"tpr", exp::decimal(pts[b].tpr)}};
        points.insert(points.end(), pts.begin(), pts.end());
    }

    namespace fs = std::filesystem;
    const std::string records_path = (fs::path(a.out) / "records.csv").string();
    const std::string summary_path = (fs::path(a.out) / "summary.csv").string();
    const std::string roc_path = (fs::path(a.out) / "roc.csv").string();
    const std::string svg_path = (fs::path(a.out) / "roc.svg").string();
    const std::string manifest_path = (fs::path(a.out) / "manifest.json").string();
    {
        std::ostringstream s;
        exp::write_records_csv(s, records);
        write_file(records_path, s.str());
    }
    {
        std::ostringstream s;
        exp::write_summary_csv(s, exp::summarize(records));
        write_file(summary_path, s.str());
    }
    {
        std::ostringstream s;
        exp::write_roc_csv(s, points, best);
        write_file(roc_path, s.str());
    }
    {
        std::ostringstream s;
        exp::write_roc_svg(s, points);
        write_file(svg_path, s.str());
    }

    json outliers = json::array();
    for (const auto& o : spec.outliers) outliers.push_back({{"source", o.source}, {"k", o.k}});
    json algo_names = json::array();
    for (auto alg : algos) algo_names.push_back(exp::to_string(alg));
    const json settings = {{"command", "sweep"},
                           {"base", spec.base},
                           {"outliers", outliers},
                           {"n", spec.n},
                           {"repetitions", spec.repetitions},
                           {"seed", spec.seed},
                           {"algorithms", algo_names},
                           {"lof_grid", a.lof_grid},
                           {"hilre_grid", a.hilre_grid},
                           {"hierarchy", a.hierarchy},
                           {"scale", a.scale},
                           {"kfcs_range", a.kfcs_range},
                           {"kfcs_full", a.kfcs_full},
                           {"kfcs_minimize", a.kfcs_minimize},
                           {"reguess_k", a.reguess_k},
                           {"standard_fpr", a.standard_fpr},
                           {"cap", a.cap}};
    json m = manifest_base(g, settings, started);
    m["seed"] = spec.seed;
    m["hierarchy"] = {{"id", a.hierarchy}, {"fingerprint", exp::fnv1a_hex(hierarchy->canonical())}};
    m["outputs"] = {records_path, summary_path, roc_path, svg_path};
    write_file(manifest_path, m.dump(2) + "\n");

    std::cout << json{{"out", a.out},
                      {"records", records.size()},
                      {"best", best_json},
                      {"files", {records_path, summary_path, roc_path, svg_path, manifest_path}}}
                     .dump(2)
              << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// --config: a JSON object whose plain keys fill global options and whose
// object-valued keys (named after a subcommand) fill that subcommand's
// options. Anything given on the command line wins.

std::vector<std::string> expand_config(const std::vector<std::string>& args, const std::set<std::string>& subs) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw UsageError("config " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");

    auto given = [&](const std::string& key) {
        for (const auto& a : args) {
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        }
        return false;
    };
    auto tokens = [&](const json& obj) {
        std::vector<std::string> out;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (it.value().is_object() || given(it.key()) || it.key() == "config") continue;
            auto push = [&](const json& v) {
                if (v.is_boolean()) {
                    if (v.get<bool>()) out.push_back("--" + it.key());
                    return;
                }
                out.push_back("--" + it.key());
                out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            };
            if (it.value().is_array()) {
                for (const auto& v : it.value()) push(v);
            } else {
                push(it.value());
            }
        }
        return out;
    };

    std::vector<std::string> out{args[0]};
    const auto globals = tokens(cfg);
    out.insert(out.end(), globals.begin(), globals.end());
    for (std::size_t i = 1; i < args.size(); ++i) {
        out.push_back(args[i]);
        if (subs.count(args[i]) && cfg.contains(args[i]) && cfg[args[i]].is_object()) {
            const auto sub = tokens(cfg[args[i]]);
            out.insert(out.end(), sub.begin(), sub.end());
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    Global g;
    g.argv.assign(argv, argv + argc);

    CLI::App app{"String outlier detection with LOF and hierarchical left regular expressions", "strout"};
    app.set_version_flag("--version", std::string("strout ") + kVersion);
    app.require_subcommand(1);
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--config", g.config, "JSON file with option values");
    app.add_option("--manifest", g.manifest, "Write a run manifest to this path");

    LofArgs lof;
    auto* c_lof = app.add_subcommand("lof", "Local outlier factor with iterative thresholding");
    c_lof->add_option("--input", lof.input, "One string per line ('-' for stdin)")->required();
    c_lof->add_option("--metric", lof.metric, "unweighted or hierarchical");
    c_lof->add_option("--hierarchy", lof.hierarchy, "Hierarchy name or JSON path");
    c_lof->add_option("--factor", lof.factor, "Threshold factor f");
    c_lof->add_option("--scale", lof.scale, "Substitution scale for the hierarchical metric");
    c_lof->add_option("--indel", lof.indel, "Insertion/deletion cost for the hierarchical metric");
    c_lof->add_option("--k", lof.k, "Fixed neighborhood size (skips KFCS)");
    c_lof->add_option("--kfcs-range", lof.kfcs_range, "KFCS search range a..b");
    c_lof->add_flag("--kfcs-full", lof.kfcs_full, "Search every k in 1..n-1");
    c_lof->add_flag("--kfcs-minimize", lof.kfcs_minimize, "Pick the k with the lowest consistency value");
    c_lof->add_flag("--reguess-k", lof.reguess_k, "Re-run KFCS in every thresholding round");
    c_lof->add_flag("--strict-alphabet", lof.strict_alphabet, "Fail on characters outside the hierarchy");
    c_lof->add_option("--scores", lof.scores, "CSV dump of first-round scores");
    c_lof->add_option("--dump-distances", lof.dump_distances, "CSV dump of the distance matrix");

    HilreArgs hd;
    auto* c_hd = app.add_subcommand("hilre-detect", "Outliers as strings rejected by the selected HiLRE");
    c_hd->add_option("--input", hd.input, "One string per line ('-' for stdin)")->required();
    c_hd->add_option("--hierarchy", hd.hierarchy, "Hierarchy name or JSON path");
    c_hd->add_option("--pmin", hd.pmin, "Minimum share of strings H* must match");
    c_hd->add_option("--dump-candidates", hd.dump_candidates, "CSV dump of all candidates");
    c_hd->add_option("--cap", hd.cap, "Maximum number of candidates");
    c_hd->add_flag("--strict-alphabet", hd.strict_alphabet, "Fail on characters outside the hierarchy");

    InferArgs inf;
    auto* c_inf = app.add_subcommand("infer", "Learn one HiLRE matching every input string");
    c_inf->add_option("--input", inf.input, "One string per line ('-' for stdin)")->required();
    c_inf->add_option("--hierarchy", inf.hierarchy, "Hierarchy name or JSON path");
    c_inf->add_flag("--strict-alphabet", inf.strict_alphabet, "Fail on characters outside the hierarchy");

    MatchArgs mt;
    auto* c_mt = app.add_subcommand("match", "Filter strings by a rendered HiLRE");
    c_mt->add_option("--regex", mt.regex, "Expression in rendered form")->required();
    c_mt->add_option("--input", mt.input, "One string per line (default stdin)");
    c_mt->add_option("--hierarchy", mt.hierarchy, "Hierarchy name or JSON path");

    SynthArgs sy;
    auto* c_sy = app.add_subcommand("synth", "Generate synthetic datasets");
    c_sy->add_option("--dates", sy.dates, "Number of consecutive dates");
    c_sy->add_option("--start", sy.start, "First date (YYYY-MM-DD)");
    c_sy->add_option("--generator", sy.generator, "zip, county, house or phone");
    c_sy->add_option("--count", sy.count, "Number of generated values");
    c_sy->add_option("--inject", sy.inject, "Outlier source: bad-dates, a generator, or a file");
    c_sy->add_option("--inject-count", sy.inject_count, "Number of injected values (default: whole list)");
    c_sy->add_option("--seed", sy.seed, "Random seed");
    c_sy->add_option("--output", sy.output, "Write the dataset here instead of stdout");
    c_sy->add_option("--truth", sy.truth, "CSV marking injected lines");

    SweepArgs sw;
    auto* c_sw = app.add_subcommand("sweep", "Parameter sweep over mixed datasets");
    c_sw->add_option("--base", sw.base, "Base source (builtin name or file)");
    c_sw->add_option("--outlier", sw.outliers, "Outlier source and count, SOURCE:K (repeatable)");
    c_sw->add_option("--n", sw.n, "Dataset size");
    c_sw->add_option("--repetitions", sw.repetitions, "Repetitions per parameter");
    c_sw->add_option("--seed", sw.seed, "Random seed");
    c_sw->add_option("--algorithm", sw.algorithms, "hilre, lof-unweighted, lof-hierarchical (repeatable)");
    c_sw->add_option("--lof-grid", sw.lof_grid, "Comma-separated threshold factors");
    c_sw->add_option("--hilre-grid", sw.hilre_grid, "Comma-separated p_min values");
    c_sw->add_option("--hierarchy", sw.hierarchy, "Hierarchy name or JSON path");
    c_sw->add_option("--out", sw.out, "Output directory");
    c_sw->add_option("--scale", sw.scale, "Substitution scale for the hierarchical metric");
    c_sw->add_option("--kfcs-range", sw.kfcs_range, "KFCS search range a..b");
    c_sw->add_flag("--kfcs-full", sw.kfcs_full, "Search every k in 1..n-1");
    c_sw->add_flag("--kfcs-minimize", sw.kfcs_minimize, "Pick the k with the lowest consistency value");
    c_sw->add_flag("--reguess-k", sw.reguess_k, "Re-run KFCS in every thresholding round");
    c_sw->add_flag("--standard-fpr", sw.standard_fpr, "Use fp/negatives on the ROC axis");
    c_sw->add_option("--cap", sw.cap, "Maximum number of HiLRE candidates");

    try {
        std::set<std::string> subs;
        for (const auto* s : app.get_subcommands({})) subs.insert(s->get_name());
        std::vector<std::string> args = expand_config(g.argv, subs);
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const strout::Error& e) {
        std::cerr << "strout: " << e.what() << '\n';
        return 2;
    }

    try {
        if (c_lof->parsed()) return cmd_lof(g, lof);
        if (c_hd->parsed()) return cmd_hilre_detect(g, hd);
        if (c_inf->parsed()) return cmd_infer(g, inf);
        if (c_mt->parsed()) return cmd_match(g, mt);
        if (c_sy->parsed()) return cmd_synth(g, sy);
        if (c_sw->parsed()) return cmd_sweep(g, sw);
    } catch (const strout::Error& e) {
        std::cerr << "strout: " << e.what() << '\n';
        return e.is_usage_error() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "strout: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

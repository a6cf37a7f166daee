#pragma once

#include <pueval/beta_analysis.hpp>
#include <pueval/cdf_band.hpp>
#include <pueval/curves.hpp>
#include <pueval/error.hpp>
#include <pueval/io.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>
#include <pueval/synth.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pueval::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchema = "pueval.result/1";

// Exit codes are part of the command-line contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;       // bad flags, unparsable input or config
inline constexpr int kExitEstimation = 3;  // infeasible beta, too little labeled data, degenerate curve
inline constexpr int kExitMismatch = 4;    // compared inputs do not cover the same examples

inline int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidLevel:
    case ErrorCode::InvalidScore:
    case ErrorCode::EmptyInput:
        return kExitUsage;
    case ErrorCode::InfeasibleBeta:
    case ErrorCode::InsufficientPositives:
    case ErrorCode::InsufficientNegatives:
    case ErrorCode::DegenerateCurve:
    case ErrorCode::EmptySet:
    case ErrorCode::NoNegatives:
        return kExitEstimation;
    case ErrorCode::IncomparableModels:
        return kExitMismatch;
    default:
        return kExitInternal;
    }
}

/// Field excluded from the determinism contract.
inline constexpr const char* kTimestampField = "generated_at";

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Removes the timestamp so two documents can be compared byte for byte.
inline void strip_timestamp(json& doc) {
    if (doc.contains("metadata")) doc["metadata"].erase(kTimestampField);
}

struct BandOptions {
    std::size_t resamples = kDefaultResamples;
    double confidence = kDefaultConfidence;
    std::uint64_t seed = 0;
    bool degenerate = false;
};

inline CdfBand make_band(const Ranking& ranking, const BandOptions& o) {
    return o.degenerate ? degenerate_band(ranking) : bootstrap_band(ranking, o.resamples, o.confidence, o.seed);
}

inline json band_json(const BandOptions& o) {
    if (o.degenerate) return json{{"method", "degenerate"}};
    return json{{"method", "bootstrap-percentile"}, {"resamples", o.resamples}, {"confidence", o.confidence}, {"seed", o.seed}};
}

/// "a:b:step" -> a, a+step, ..., b. A single value or a == b gives one point.
inline std::vector<double> parse_grid(const std::string& text) {
    auto bad = [&](const std::string& why) { return Error(ErrorCode::InvalidArgument, "beta grid '" + text + "': " + why); };
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        const auto t = detail::trim(item);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) throw bad("not a number");
        parts.push_back(v);
    }
    if (parts.size() == 1) parts = {parts[0], parts[0], 1.0};
    if (parts.size() != 3) throw bad("expected a:b:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (a < 0.0 || b > 1.0 || a > b) throw bad("need 0 <= a <= b <= 1");
    if (a == b) return {a};
    if (!(step > 0.0)) throw bad("step must be > 0");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        double v = a + static_cast<double>(i) * step;
        if (v > b + 1e-9) break;
        v = std::round(v * 1e12) / 1e12;  // 0.1 * 3 should print as 0.3
        out.push_back(std::min(v, b));
        if (out.size() > 100000) throw bad("too many points");
    }
    if (out.size() >= 2 && out.back() <= out[out.size() - 2]) out.pop_back();
    return out;
}

inline ScoreFile load_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    try {
        return read_scores(in);
    } catch (const Error& e) {
        const std::string what = e.what();
        const std::size_t skip = to_string(e.code()).size() + 2;
        throw Error(e.code(), path + ": " + what.substr(std::min(skip, what.size())), e.index());
    }
}

inline json input_json(const std::string& path, const Ranking& r) {
    return json{{"path", path},
                {"rows", r.size()},
                {"known_positives", r.n_pos_labeled()},
                {"known_negatives", r.n_neg_labeled()},
                {"unlabeled", r.n_unlabeled()},
                {"tied_scores", r.tie_count()}};
}

inline json make_document(const std::string& command, json metadata, json results) {
    json meta;
    meta["tool_version"] = kToolVersion;
    meta[kTimestampField] = utc_timestamp();
    meta["nondeterministic_fields"] = json::array({std::string("metadata.") + kTimestampField});
    for (auto& [k, v] : metadata.items()) meta[k] = v;
    return json{{"schema", kSchema}, {"command", command}, {"metadata", std::move(meta)}, {"results", std::move(results)}};
}

inline void emit(const json& doc, const std::string& out_path, std::ostream& out) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + out_path + "'");
    f << text;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string input;
    std::optional<double> beta, beta_lo, beta_up;
    BandOptions band;
    std::string mode = "direct";
    std::string sensitivity = "none";
    std::string out;
};

struct SourceResult {
    json body = json::object();
    AucInterval roc;
};

inline SourceResult estimate_source(const Ranking& ranking, BoundSource source, const EstimateArgs& a) {
    const bool direct = source == BoundSource::Direct;
    const CdfBand band = make_band(direct ? ranking : flip_ranking(ranking), a.band);
    SourceResult res;
    json band_info = band_json(a.band);
    band_info["fit_on"] = direct ? "known_positives" : "known_negatives";
    res.body["band"] = band_info;
    if (a.beta) {
        const BetaSpec spec{*a.beta, a.beta_lo, a.beta_up};
        spec.validate();
        const BoundTables tables = direct ? bound_tables(ranking, band, *a.beta) : flipped_bounds(ranking, band, *a.beta);
        const BoundCurve roc = roc_bounds(tables);
        res.body["point"] = json{{"beta", *a.beta},
                                 {"roc", curve_json(roc)},
                                 {"pr", curve_json(pr_bounds(tables))},
                                 {"diagnostics", diagnostics_json(tables)}};
        res.roc = auc_interval(roc);
        if (a.sensitivity != "none") {
            if (!direct) throw Error(ErrorCode::InvalidArgument, "--sensitivity is only available for direct estimates");
            const BandSide side = a.sensitivity == "upper" ? BandSide::Upper : BandSide::Lower;
            res.body["sensitivity"] = sensitivity_json(pueval::sensitivity(ranking, band, *a.beta, side));
        }
    }
    if (a.beta_lo) {
        const IntervalBounds ib = direct ? interval_bounds(ranking, band, *a.beta_lo, *a.beta_up)
                                         : flipped_interval_bounds(ranking, band, *a.beta_lo, *a.beta_up);
        res.body["interval"] = json{{"beta_lo", *a.beta_lo},
                                    {"beta_up", *a.beta_up},
                                    {"roc", curve_json(ib.roc)},
                                    {"pr", curve_json(ib.pr)},
                                    {"not_better_than_random_fraction", ib.not_better_than_random_fraction},
                                    {"randomness_warning", ib.randomness_warning},
                                    {"diagnostics", diagnostics_json(ib.tables)}};
        if (!a.beta) res.roc = auc_interval(ib.roc);
    }
    return res;
}

inline bool missing_data(const Error& e) {
    return e.code() == ErrorCode::InsufficientPositives || e.code() == ErrorCode::InsufficientNegatives ||
           e.code() == ErrorCode::DegenerateCurve;
}

inline json cmd_estimate(const EstimateArgs& a) {
    if (!a.beta && !a.beta_lo && !a.beta_up)
        throw Error(ErrorCode::InvalidArgument, "give --beta, or both --beta-lo and --beta-up");
    if (a.beta_lo.has_value() != a.beta_up.has_value())
        throw Error(ErrorCode::InvalidArgument, "--beta-lo and --beta-up must be given together");
    if (a.beta_lo && !(0.0 <= *a.beta_lo && *a.beta_lo <= *a.beta_up && *a.beta_up <= 1.0))
        throw Error(ErrorCode::InfeasibleBeta, "beta interval must satisfy 0 <= lo <= up <= 1");

    const ScoreFile file = load_scores(a.input);
    const Ranking ranking = build_ranking(to_examples(file.records));

    json results;
    results["mode"] = a.mode;
    if (a.mode == "tightest") {
        std::optional<SourceResult> direct, flipped;
        json reasons = json::object();
        std::optional<Error> first_error;
        for (BoundSource s : {BoundSource::Direct, BoundSource::Flipped}) {
            try {
                if (s == BoundSource::Direct) direct = estimate_source(ranking, s, a);
                else flipped = estimate_source(ranking, s, a);
            } catch (const Error& e) {
                if (!missing_data(e)) throw;
                reasons[std::string(to_string(s))] = e.what();
                if (!first_error) first_error = e;
            }
        }
        if (!direct && !flipped) throw *first_error;
        const TightestInterval pick = tightest_bounds(direct ? std::optional(direct->roc) : std::nullopt,
                                                      flipped ? std::optional(flipped->roc) : std::nullopt);
        const SourceResult& chosen = pick.source == BoundSource::Direct ? *direct : *flipped;
        results["source"] = to_string(pick.source);
        for (auto& [k, v] : chosen.body.items()) results[k] = v;
        results["tightest"] = json{{"direct", direct ? interval_json(direct->roc) : json(nullptr)},
                                   {"flipped", flipped ? interval_json(flipped->roc) : json(nullptr)},
                                   {"selected", to_string(pick.source)},
                                   {"unavailable", reasons}};
    } else {
        const BoundSource s = a.mode == "flipped" ? BoundSource::Flipped : BoundSource::Direct;
        results["source"] = to_string(s);
        const SourceResult res = estimate_source(ranking, s, a);
        for (auto& [k, v] : res.body.items()) results[k] = v;
    }

    json beta_meta;
    beta_meta["beta_hat"] = a.beta ? json(*a.beta) : json(nullptr);
    beta_meta["beta_lo"] = a.beta_lo ? json(*a.beta_lo) : json(nullptr);
    beta_meta["beta_up"] = a.beta_up ? json(*a.beta_up) : json(nullptr);
    json meta{{"inputs", json::array({input_json(a.input, ranking)})},
              {"beta", beta_meta},
              {"band", band_json(a.band)},
              {"mode", a.mode}};
    return make_document("estimate", std::move(meta), std::move(results));
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string input;
    std::string grid;
    BandOptions band;
    bool full_curves = false;
    std::string out;
};

inline json cmd_sweep(const SweepArgs& a) {
    const std::vector<double> grid = parse_grid(a.grid);
    const ScoreFile file = load_scores(a.input);
    const Ranking ranking = build_ranking(to_examples(file.records));
    const CdfBand band = make_band(ranking, a.band);
    const BetaSweepResult sweep = sweep_beta(ranking, band, grid, a.full_curves);
    json meta{{"inputs", json::array({input_json(a.input, ranking)})},
              {"beta_grid", a.grid},
              {"band", band_json(a.band)},
              {"full_curves", a.full_curves}};
    return make_document("sweep", std::move(meta), sweep_json(sweep));
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareArgs {
    std::vector<std::string> inputs;
    std::string grid;
    BandOptions band;
    std::string space = "roc";
    std::string out;
};

/// Puts every file's rows in the order of the first file, matching by id when
/// all files carry ids and by row position when none do.
inline std::vector<Ranking> aligned_rankings(const std::vector<std::string>& paths) {
    std::vector<ScoreFile> files;
    for (const auto& p : paths) files.push_back(load_scores(p));
    const bool ids = files[0].has_ids;
    std::map<std::string, std::size_t> index;
    if (ids) {
        for (std::size_t i = 0; i < files[0].records.size(); ++i)
            if (!index.emplace(*files[0].records[i].id, i).second)
                throw Error(ErrorCode::IncomparableModels, paths[0] + ": duplicate id '" + *files[0].records[i].id + "'");
    }
    std::vector<Ranking> out;
    for (std::size_t f = 0; f < files.size(); ++f) {
        const auto& recs = files[f].records;
        if (files[f].has_ids != ids) throw Error(ErrorCode::IncomparableModels, "either all inputs or none must have an id column");
        if (recs.size() != files[0].records.size())
            throw Error(ErrorCode::IncomparableModels, paths[f] + ": row count differs from " + paths[0]);
        std::vector<Example> ex(recs.size());
        std::vector<bool> seen(recs.size(), false);
        for (std::size_t i = 0; i < recs.size(); ++i) {
            std::size_t slot = i;
            if (ids) {
                const auto it = index.find(*recs[i].id);
                if (it == index.end()) throw Error(ErrorCode::IncomparableModels, paths[f] + ": unknown id '" + *recs[i].id + "'");
                slot = it->second;
                if (seen[slot]) throw Error(ErrorCode::IncomparableModels, paths[f] + ": duplicate id '" + *recs[i].id + "'");
                seen[slot] = true;
            }
            if (recs[i].label != files[0].records[slot].label)
                throw Error(ErrorCode::IncomparableModels, paths[f] + ": label differs from " + paths[0] + " at row " + std::to_string(i + 1));
            ex[i] = {recs[i].score, label_from_int(recs[i].label), slot};
        }
        out.push_back(build_ranking(std::move(ex)));
    }
    return out;
}

inline json cmd_compare(const CompareArgs& a) {
    if (a.inputs.size() < 2) throw Error(ErrorCode::InvalidArgument, "compare needs at least two input files");
    const std::vector<double> grid = parse_grid(a.grid);
    const std::vector<Ranking> rankings = aligned_rankings(a.inputs);
    std::vector<CdfBand> bands;
    for (const auto& r : rankings) bands.push_back(make_band(r, a.band));
    const CurveSpace space = a.space == "pr" ? CurveSpace::Pr : CurveSpace::Roc;
    const ModelComparison cmp = compare_models(rankings, bands, grid, space);
    json inputs = json::array();
    for (std::size_t i = 0; i < rankings.size(); ++i) inputs.push_back(input_json(a.inputs[i], rankings[i]));
    json meta{{"inputs", std::move(inputs)}, {"beta_grid", a.grid}, {"band", band_json(a.band)}, {"space", a.space}};
    return make_document("compare", std::move(meta), comparison_json(cmp, a.inputs));
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config_path;
    std::size_t unlabeled = 10000;
    double beta = 0.2;
    std::vector<std::size_t> labeled_positives{100, 500, 2000};
    std::size_t repeats = 20;
    std::uint64_t seed = 0;
    std::optional<double> beta_hat;
    std::string pos_dist = "gaussian:1,1";
    std::string neg_dist = "gaussian:0,1";
    BandOptions band;
    bool full_scale = false;
    std::string out;
    // which inline flags were given explicitly; those override the config file
    std::map<std::string, bool> given;
};

/// "gaussian:mean,sd" or "uniform:low,high".
inline ScoreDistribution parse_distribution(const std::string& text) {
    const auto colon = text.find(':');
    const auto comma = text.find(',', colon == std::string::npos ? 0 : colon);
    auto bad = [&] { return Error(ErrorCode::InvalidConfig, "distribution '" + text + "': expected kind:a,b"); };
    if (colon == std::string::npos || comma == std::string::npos) throw bad();
    double a = 0.0, b = 0.0;
    try {
        std::size_t used = 0;
        a = std::stod(text.substr(colon + 1, comma - colon - 1), &used);
        b = std::stod(text.substr(comma + 1), &used);
        if (comma + 1 + used != text.size()) throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    const std::string kind = text.substr(0, colon);
    ScoreDistribution d;
    if (kind == "gaussian") d = ScoreDistribution::gaussian(a, b);
    else if (kind == "uniform") d = ScoreDistribution::uniform(a, b);
    else throw bad();
    d.validate();
    return d;
}

struct SimulationPlan {
    std::vector<SynthConfig> grid;
    StudyOptions options;
    std::uint64_t seed = 0;
};

inline SimulationPlan plan_simulation(const SimulateArgs& a) {
    json cfg = json::object();
    if (!a.config_path.empty()) {
        std::ifstream in(a.config_path);
        if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + a.config_path + "'");
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, a.config_path + ": " + e.what());
        }
        if (!cfg.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be an object");
    }
    auto flag = [&](const char* name) { return a.given.count(name) && a.given.at(name); };
    // Explicit flags beat the config file, which beats flag defaults.
    auto pick = [&](const char* flag_name, const char* key, auto flag_value) {
        using T = decltype(flag_value);
        if (flag(flag_name) || !cfg.contains(key)) return flag_value;
        try {
            return cfg.at(key).template get<T>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, std::string("config key '") + key + "': " + e.what());
        }
    };

    const bool full = a.full_scale || (cfg.contains("full_scale") && cfg["full_scale"].is_boolean() && cfg["full_scale"].get<bool>());
    SimulationPlan plan;
    plan.seed = pick("--seed", "seed", a.seed);
    plan.options.repeats = pick("--repeats", "repeats", full && !flag("--repeats") ? std::size_t{200} : a.repeats);
    plan.options.resamples = pick("--resamples", "resamples", a.band.resamples);
    plan.options.confidence_level = pick("--confidence", "confidence", a.band.confidence);
    plan.options.degenerate = pick("--degenerate-band", "degenerate_band", a.band.degenerate);
    if (flag("--beta-hat")) plan.options.beta_hat = a.beta_hat;
    else if (cfg.contains("beta_hat") && !cfg["beta_hat"].is_null()) plan.options.beta_hat = pick("--beta-hat", "beta_hat", 0.0);
    if (plan.options.repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be >= 1");
    if (!plan.options.degenerate && !(plan.options.confidence_level > 0.0 && plan.options.confidence_level < 1.0))
        throw Error(ErrorCode::InvalidConfig, "confidence must lie in (0, 1)");
    if (plan.options.beta_hat && !(*plan.options.beta_hat >= 0.0 && *plan.options.beta_hat <= 1.0))
        throw Error(ErrorCode::InvalidConfig, "beta_hat must lie in [0, 1]");

    const ScoreDistribution pos = flag("--pos-dist") || !cfg.contains("pos_score") ? parse_distribution(a.pos_dist)
                                                                                   : distribution_from_json(cfg["pos_score"]);
    const ScoreDistribution neg = flag("--neg-dist") || !cfg.contains("neg_score") ? parse_distribution(a.neg_dist)
                                                                                   : distribution_from_json(cfg["neg_score"]);

    if (cfg.contains("grid")) {
        if (!cfg["grid"].is_array() || cfg["grid"].empty()) throw Error(ErrorCode::InvalidConfig, "grid must be a non-empty array");
        for (const auto& g : cfg["grid"]) {
            SynthConfig c;
            try {
                c.n_pos = g.at("n_pos").get<std::size_t>();
                c.n_neg = g.at("n_neg").get<std::size_t>();
                c.labeled_pos_fraction = g.at("labeled_pos_fraction").get<double>();
                c.labeled_neg_fraction = g.value("labeled_neg_fraction", 0.0);
            } catch (const json::exception& e) {
                throw Error(ErrorCode::InvalidConfig, std::string("grid entry: ") + e.what());
            }
            c.pos_score = g.contains("pos_score") ? distribution_from_json(g["pos_score"]) : pos;
            c.neg_score = g.contains("neg_score") ? distribution_from_json(g["neg_score"]) : neg;
            c.seed = plan.seed;
            plan.grid.push_back(c);
        }
    } else {
        const std::size_t unlabeled = pick("--unlabeled", "unlabeled", full && !flag("--unlabeled") ? std::size_t{100000} : a.unlabeled);
        const double beta = pick("--beta", "beta", a.beta);
        const auto labeled = pick("--labeled-positives", "labeled_positives", a.labeled_positives);
        if (labeled.empty()) throw Error(ErrorCode::InvalidConfig, "labeled_positives must not be empty");
        if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "beta must lie in [0, 1]");
        for (std::size_t lp : labeled) {
            if (lp == 0) throw Error(ErrorCode::InvalidConfig, "labeled_positives entries must be positive");
            SynthConfig c = unlabeled_config(unlabeled, beta, lp, plan.seed);
            if (c.n_neg == 0) throw Error(ErrorCode::InvalidConfig, "beta leaves no negatives");
            c.pos_score = pos;
            c.neg_score = neg;
            plan.grid.push_back(c);
        }
    }
    for (const auto& c : plan.grid) c.validate();
    return plan;
}

inline json cmd_simulate(const SimulateArgs& a) {
    const SimulationPlan plan = plan_simulation(a);
    const std::vector<StudyPoint> study = convergence_study(plan.grid, plan.options);
    json widths = json::array(), coverage = json::array();
    for (const auto& p : study) {
        widths.push_back(p.mean_width);
        coverage.push_back(p.coverage);
    }
    BandOptions band{plan.options.resamples, plan.options.confidence_level, plan.seed, plan.options.degenerate};
    json meta{{"config_file", a.config_path.empty() ? json(nullptr) : json(a.config_path)},
              {"repeats", plan.options.repeats},
              {"seed", plan.seed},
              {"beta_hat", plan.options.beta_hat ? json(*plan.options.beta_hat) : json("true beta of each dataset")},
              {"band", band_json(band)},
              {"seeding", "repeat i of every grid point uses dataset and bootstrap seed seed + i"}};
    json results{{"mean_widths", std::move(widths)}, {"coverage", std::move(coverage)}, {"points", study_json(study)}};
    return make_document("simulate", std::move(meta), std::move(results));
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline void add_band_options(CLI::App* sub, BandOptions& o) {
    sub->add_option("--resamples", o.resamples, "bootstrap resamples")->check(CLI::PositiveNumber);
    sub->add_option("--confidence", o.confidence, "band confidence level in (0, 1)");
    sub->add_option("--seed", o.seed, "bootstrap seed");
    sub->add_flag("--degenerate-band", o.degenerate, "use the empirical CDF of the known positives as the band");
}

/// Runs one command. `args` excludes the program name. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bounds on ROC/PR curves and AUC from positive and unlabeled test data", "pueval"};
    app.set_version_flag("--version", std::string("pueval ") + kToolVersion);
    app.require_subcommand(1);
    app.footer("Exit codes: 0 ok, 1 internal error, 2 usage/parse/config error,\n"
               "3 infeasible beta or insufficient labeled data, 4 compared inputs do not match.");

    EstimateArgs est;
    double beta = 0, beta_lo = 0, beta_up = 0;
    auto* e = app.add_subcommand("estimate", "bound curves and AUC for one score file");
    e->add_option("input", est.input, "score file (columns: id?, score, label)")->required();
    auto* o_beta = e->add_option("--beta", beta, "estimated latent-positive fraction of the unlabeled set");
    auto* o_lo = e->add_option("--beta-lo", beta_lo, "lower end of a beta interval");
    auto* o_up = e->add_option("--beta-up", beta_up, "upper end of a beta interval");
    e->add_option("--mode", est.mode, "direct, flipped or tightest")->check(CLI::IsMember({"direct", "flipped", "tightest"}));
    e->add_option("--sensitivity", est.sensitivity, "report d/dbeta against the lower or upper band")
        ->check(CLI::IsMember({"none", "lower", "upper"}));
    e->add_option("--out", est.out, "output file (default stdout)");
    add_band_options(e, est.band);

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "AUC intervals over a grid of beta values");
    s->add_option("input", sw.input, "score file")->required();
    s->add_option("--beta-grid", sw.grid, "a:b:step")->required();
    s->add_flag("--full-curves", sw.full_curves, "include bound curves for every beta");
    s->add_option("--out", sw.out, "output file (default stdout)");
    add_band_options(s, sw.band);

    CompareArgs cmp;
    auto* c = app.add_subcommand("compare", "AUC orderings of several models over a beta grid");
    c->add_option("inputs", cmp.inputs, "score files sharing ids")->required()->expected(2, -1);
    c->add_option("--beta-grid", cmp.grid, "a:b:step")->required();
    c->add_option("--space", cmp.space, "roc or pr")->check(CLI::IsMember({"roc", "pr"}));
    c->add_option("--out", cmp.out, "output file (default stdout)");
    add_band_options(c, cmp.band);

    SimulateArgs sim;
    double beta_hat = 0;
    std::vector<CLI::Option*> sim_opts;
    auto* m = app.add_subcommand("simulate", "interval width and coverage on synthetic data");
    m->add_option("--config", sim.config_path, "JSON config file");
    sim_opts.push_back(m->add_option("--unlabeled", sim.unlabeled, "size of the unlabeled set"));
    sim_opts.push_back(m->add_option("--beta", sim.beta, "latent-positive fraction of the unlabeled set"));
    sim_opts.push_back(m->add_option("--labeled-positives", sim.labeled_positives, "grid of known-positive counts")->delimiter(','));
    sim_opts.push_back(m->add_option("--repeats", sim.repeats, "repeats per grid point"));
    sim_opts.push_back(m->add_option("--seed", sim.seed, "base seed"));
    sim_opts.push_back(m->add_option("--beta-hat", beta_hat, "beta estimate (default: true beta of each dataset)"));
    sim_opts.push_back(m->add_option("--pos-dist", sim.pos_dist, "gaussian:mean,sd or uniform:low,high"));
    sim_opts.push_back(m->add_option("--neg-dist", sim.neg_dist, "gaussian:mean,sd or uniform:low,high"));
    sim_opts.push_back(m->add_option("--resamples", sim.band.resamples, "bootstrap resamples")->check(CLI::PositiveNumber));
    sim_opts.push_back(m->add_option("--confidence", sim.band.confidence, "band confidence level"));
    sim_opts.push_back(m->add_flag("--degenerate-band", sim.band.degenerate, "use the degenerate band"));
    m->add_flag("--full-scale", sim.full_scale, "|U| = 100000 and 200 repeats unless given");
    m->add_option("--out", sim.out, "output file (default stdout)");

    std::vector<const char*> argv{"pueval"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (e->parsed()) {
            if (o_beta->count()) est.beta = beta;
            if (o_lo->count()) est.beta_lo = beta_lo;
            if (o_up->count()) est.beta_up = beta_up;
            emit(cmd_estimate(est), est.out, out);
        } else if (s->parsed()) {
            emit(cmd_sweep(sw), sw.out, out);
        } else if (c->parsed()) {
            emit(cmd_compare(cmp), cmp.out, out);
        } else if (m->parsed()) {
            for (auto* opt : sim_opts) sim.given[opt->get_name()] = opt->count() > 0;
            if (sim.given["--beta-hat"]) sim.beta_hat = beta_hat;
            emit(cmd_simulate(sim), sim.out, out);
        }
    } catch (const Error& ex) {
        err << "pueval: " << ex.what() << "\n";
        return exit_code_for(ex.code());
    } catch (const std::exception& ex) {
        err << "pueval: internal error: " << ex.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

} // namespace pueval::cli

#pragma once

#include <pueval/beta_analysis.hpp>
#include <pueval/curves.hpp>
#include <pueval/error.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>
#include <pueval/synth.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pueval {

using json = nlohmann::ordered_json;

struct ScoreRecord {
    double score = 0.0;
    int label = 0;  ///< 1 known positive, -1 known negative, 0 unlabeled
    std::optional<std::string> id;
};

struct ScoreFile {
    std::vector<ScoreRecord> records;
    bool has_ids = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string lower_case(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what, line);
}

} // namespace detail

/// Reads delimiter-separated score rows. The first non-comment line is a
/// header naming the columns score, label and optionally id (any order,
/// case-insensitive); other columns are ignored. Tab is the delimiter when the
/// header contains one, otherwise comma. Lines starting with '#' and blank
/// lines are skipped. Errors carry the 1-based line number in index().
inline ScoreFile read_scores(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    std::optional<char> delim;
    std::size_t score_col = 0, label_col = 0, columns = 0;
    std::optional<std::size_t> id_col;
    ScoreFile out;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;

        if (!delim) {
            delim = t.find('\t') != std::string_view::npos ? '\t' : ',';
            const auto names = detail::split(t, *delim);
            std::optional<std::size_t> s, l;
            for (std::size_t i = 0; i < names.size(); ++i) {
                const std::string name = detail::lower_case(names[i]);
                auto claim = [&](std::optional<std::size_t>& slot) {
                    if (slot) detail::parse_fail(line_no, "duplicate column '" + name + "'");
                    slot = i;
                };
                if (name == "score") claim(s);
                else if (name == "label") claim(l);
                else if (name == "id") claim(id_col);
            }
            if (!s || !l) detail::parse_fail(line_no, "header must name 'score' and 'label' columns");
            score_col = *s;
            label_col = *l;
            columns = names.size();
            out.has_ids = id_col.has_value();
            continue;
        }

        const auto fields = detail::split(t, *delim);
        if (fields.size() != columns)
            detail::parse_fail(line_no, "expected " + std::to_string(columns) + " fields, found " +
                                            std::to_string(fields.size()));
        ScoreRecord rec;
        const std::string_view sf = fields[score_col];
        const auto [sp, sec] = std::from_chars(sf.data(), sf.data() + sf.size(), rec.score);
        if (sec != std::errc() || sp != sf.data() + sf.size())
            detail::parse_fail(line_no, "score '" + std::string(sf) + "' is not a number");
        if (!std::isfinite(rec.score)) detail::parse_fail(line_no, "score must be finite");

        std::string_view lf = fields[label_col];
        if (!lf.empty() && lf.front() == '+') lf.remove_prefix(1);
        const auto [lp, lec] = std::from_chars(lf.data(), lf.data() + lf.size(), rec.label);
        if (lec != std::errc() || lp != lf.data() + lf.size() || rec.label < -1 || rec.label > 1)
            detail::parse_fail(line_no, "label '" + std::string(fields[label_col]) + "' must be 1, -1 or 0");

        if (id_col) {
            if (fields[*id_col].empty()) detail::parse_fail(line_no, "empty id");
            rec.id = std::string(fields[*id_col]);
        }
        out.records.push_back(std::move(rec));
    }
    if (!delim) throw Error(ErrorCode::ParseError, "missing header line", line_no);
    if (out.records.empty()) throw Error(ErrorCode::EmptyInput, "no data rows");
    return out;
}

inline Label label_from_int(int label) {
    if (label == 1) return Label::KnownPositive;
    if (label == -1) return Label::KnownNegative;
    if (label == 0) return Label::Unlabeled;
    throw Error(ErrorCode::InvalidArgument, "label must be 1, -1 or 0");
}

inline std::vector<Example> to_examples(const std::vector<ScoreRecord>& records) {
    std::vector<Example> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out.push_back({records[i].score, label_from_int(records[i].label), i});
    return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json points_json(const std::vector<CurvePoint>& pts) {
    json x = json::array(), y = json::array();
    for (const auto& p : pts) {
        x.push_back(p.x);
        y.push_back(p.y);
    }
    return json{{"x", std::move(x)}, {"y", std::move(y)}};
}

inline std::vector<CurvePoint> points_from_json(const json& j) {
    const auto& x = j.at("x");
    const auto& y = j.at("y");
    if (x.size() != y.size()) throw Error(ErrorCode::ParseError, "x and y arrays differ in length");
    std::vector<CurvePoint> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = {x[i].get<double>(), y[i].get<double>()};
    return out;
}

inline json interval_json(const AucInterval& i) { return json{{"lower", i.lower}, {"upper", i.upper}}; }

inline json curve_json(const BoundCurve& c) {
    return json{{"space", std::string(to_string(c.space))},
                {"lower", points_json(c.lower_points)},
                {"upper", points_json(c.upper_points)},
                {"auc", json{{"lower", c.auc_lower}, {"upper", c.auc_upper}}}};
}

inline BoundCurve curve_from_json(const json& j) {
    BoundCurve c;
    const auto space = j.at("space").get<std::string>();
    if (space == "roc") c.space = CurveSpace::Roc;
    else if (space == "pr") c.space = CurveSpace::Pr;
    else throw Error(ErrorCode::ParseError, "unknown curve space '" + space + "'");
    c.lower_points = points_from_json(j.at("lower"));
    c.upper_points = points_from_json(j.at("upper"));
    c.auc_lower = j.at("auc").at("lower").get<double>();
    c.auc_upper = j.at("auc").at("upper").get<double>();
    return c;
}

/// Ranks where the bound tables needed clipping or could not meet the band.
inline json diagnostics_json(const BoundTables& t) {
    auto ranks_of = [](const std::vector<bool>& flags) {
        json out = json::array();
        for (std::size_t r = 0; r < flags.size(); ++r)
            if (flags[r]) out.push_back(r);
        return out;
    };
    return json{{"surrogate_positives", t.surrogate_positives},
                {"infeasible_ranks", json{{"fpr_lower", ranks_of(t.infeasible_lower)},
                                          {"fpr_upper", ranks_of(t.infeasible_upper)}}},
                {"clipped_ranks", json{{"fpr_lower", ranks_of(t.clipped_lower)},
                                       {"fpr_upper", ranks_of(t.clipped_upper)}}}};
}

inline json sensitivity_json(const SensitivityReport& s) {
    json dtpr = json::array(), dfpr = json::array(), dprec = json::array(), clipped = json::array();
    for (const auto& r : s.ranks) {
        dtpr.push_back(r.dtpr_dbeta);
        dfpr.push_back(r.dfpr_dbeta);
        dprec.push_back(r.dprec_dbeta ? json(*r.dprec_dbeta) : json(nullptr));
        clipped.push_back(r.clipped);
    }
    return json{{"side", s.side == BandSide::Upper ? "upper" : "lower"},
                {"beta_hat", s.beta_hat},
                {"dtpr_dbeta", std::move(dtpr)},
                {"dfpr_dbeta", std::move(dfpr)},
                {"dprec_dbeta", std::move(dprec)},
                {"clipped", std::move(clipped)}};
}

inline json sweep_json(const BetaSweepResult& sweep) {
    json points = json::array();
    for (const auto& p : sweep.points) {
        json e{{"beta", p.beta},
               {"roc_auc", interval_json(p.roc)},
               {"pr_auc", interval_json(p.pr)},
               {"infeasible_ranks", p.infeasible_ranks},
               {"clipped_ranks", p.clipped_ranks}};
        if (p.roc_curve) e["roc"] = curve_json(*p.roc_curve);
        if (p.pr_curve) e["pr"] = curve_json(*p.pr_curve);
        points.push_back(std::move(e));
    }
    return json{{"beta_values", sweep.beta_values}, {"points", std::move(points)}};
}

inline json comparison_json(const ModelComparison& c, const std::vector<std::string>& names) {
    json intervals = json::array();
    for (std::size_t m = 0; m < c.intervals.size(); ++m) {
        json lo = json::array(), up = json::array();
        for (const auto& i : c.intervals[m]) {
            lo.push_back(i.lower);
            up.push_back(i.upper);
        }
        intervals.push_back(json{{"model", names.at(m)}, {"lower", std::move(lo)}, {"upper", std::move(up)}});
    }
    json switches = json::array();
    for (const auto& s : c.switches)
        switches.push_back(json{{"a", names.at(s.model_a)},
                                {"b", names.at(s.model_b)},
                                {"by_midpoint", s.by_midpoint},
                                {"by_lower", s.by_lower},
                                {"by_upper", s.by_upper}});
    return json{{"space", std::string(to_string(c.space))},
                {"models", names},
                {"beta_values", c.beta_values},
                {"auc", std::move(intervals)},
                {"order_by_midpoint", c.order_by_midpoint},
                {"order_by_lower", c.order_by_lower},
                {"order_by_upper", c.order_by_upper},
                {"switches", std::move(switches)},
                {"any_switch", c.any_switch}};
}

inline json distribution_json(const ScoreDistribution& d) {
    if (d.kind == ScoreDistribution::Kind::Gaussian) return json{{"dist", "gaussian"}, {"mean", d.a}, {"sd", d.b}};
    return json{{"dist", "uniform"}, {"low", d.a}, {"high", d.b}};
}

inline ScoreDistribution distribution_from_json(const json& j) {
    try {
        const auto kind = j.at("dist").get<std::string>();
        ScoreDistribution d;
        if (kind == "gaussian") d = ScoreDistribution::gaussian(j.at("mean").get<double>(), j.at("sd").get<double>());
        else if (kind == "uniform") d = ScoreDistribution::uniform(j.at("low").get<double>(), j.at("high").get<double>());
        else throw Error(ErrorCode::InvalidConfig, "unknown distribution '" + kind + "'");
        d.validate();
        return d;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad distribution: ") + e.what());
    }
}

inline json synth_config_json(const SynthConfig& c) {
    return json{{"n_pos", c.n_pos},
                {"n_neg", c.n_neg},
                {"labeled_pos_fraction", c.labeled_pos_fraction},
                {"labeled_neg_fraction", c.labeled_neg_fraction},
                {"pos_score", distribution_json(c.pos_score)},
                {"neg_score", distribution_json(c.neg_score)},
                {"seed", c.seed}};
}

inline json study_json(const std::vector<StudyPoint>& study) {
    json points = json::array();
    for (const auto& p : study) {
        json runs = json::array();
        for (const auto& r : p.runs)
            runs.push_back(json{{"seed", r.seed},
                                {"auc", interval_json(r.roc)},
                                {"true_auc", r.true_auc},
                                {"covered", r.covered},
                                {"band_valid", r.band_valid}});
        points.push_back(json{{"config", synth_config_json(p.config)},
                              {"labeled_positives", p.labeled_positives},
                              {"unlabeled", p.unlabeled},
                              {"mean_width", p.mean_width},
                              {"sd_width", p.sd_width ? json(*p.sd_width) : json(nullptr)},
                              {"width_ci", p.width_ci ? interval_json(*p.width_ci) : json(nullptr)},
                              {"coverage", p.coverage},
                              {"band_valid_fraction", p.band_valid_fraction},
                              {"runs", std::move(runs)}});
    }
    return points;
}

} // namespace pueval

#pragma once

#include <pueval/cdf_band.hpp>
#include <pueval/curves.hpp>
#include <pueval/error.hpp>
#include <pueval/parallel.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace pueval {

// ---------------------------------------------------------------------------
// Interval bounds from [beta_lo, beta_up]
// ---------------------------------------------------------------------------

/// Above this fraction of ranks where the point estimate is not better than
/// random, interval bounds are flagged: over/under-estimating beta only
/// loosens the bounds in the better-than-random regime.
inline constexpr double kRandomnessWarningFraction = 0.10;

struct IntervalBounds {
    BoundCurve roc;
    BoundCurve pr;
    BoundTables tables;  ///< fpr_lower from beta_up, fpr_upper from beta_lo
    double not_better_than_random_fraction = 0.0;
    bool randomness_warning = false;
};

/// Fraction of ranks 1..n-1 where TPR <= FPR for the point-estimate table
/// (degenerate band at beta_hat).
inline double not_better_than_random_fraction(const Ranking& ranking, double beta_hat) {
    const std::size_t n = ranking.size();
    if (n < 2) return 0.0;
    const BoundTables point = bound_tables(ranking, degenerate_band(ranking), beta_hat);
    std::size_t bad = 0;
    for (std::size_t r = 1; r < n; ++r) {
        const auto& t = point.fpr_lower[r];
        if (t.negatives() == 0 || t.positives() == 0) continue;
        // tp / P <= fp / N without division
        if (t.tp * t.negatives() <= t.fp * t.positives()) ++bad;
    }
    return static_cast<double>(bad) / static_cast<double>(n - 1);
}

/// Combines tables computed at the two ends of a beta interval: the upper
/// curves use the FPR-lower tables at `at_up`, the lower curves the FPR-upper
/// tables at `at_lo`.
inline BoundTables combine_interval_tables(const BoundTables& at_lo, const BoundTables& at_up) {
    BoundTables t;
    t.fpr_lower = at_up.fpr_lower;
    t.infeasible_lower = at_up.infeasible_lower;
    t.clipped_lower = at_up.clipped_lower;
    t.fpr_upper = at_lo.fpr_upper;
    t.infeasible_upper = at_lo.infeasible_upper;
    t.clipped_upper = at_lo.clipped_upper;
    t.surrogate_positives = at_up.surrogate_positives;
    t.beta_hat = at_up.beta_hat;
    return t;
}

inline IntervalBounds interval_bounds_from_tables(const Ranking& ranking, const BoundTables& at_lo,
                                                  const BoundTables& at_up, double beta_mid) {
    IntervalBounds out;
    out.tables = combine_interval_tables(at_lo, at_up);
    out.roc = roc_bounds(out.tables);
    out.pr = pr_bounds(out.tables);
    out.not_better_than_random_fraction = not_better_than_random_fraction(ranking, beta_mid);
    out.randomness_warning = out.not_better_than_random_fraction > kRandomnessWarningFraction;
    return out;
}

inline IntervalBounds interval_bounds(const Ranking& ranking, const CdfBand& band, double beta_lo, double beta_up) {
    if (!(beta_lo >= 0.0 && beta_lo <= beta_up && beta_up <= 1.0))
        throw Error(ErrorCode::InfeasibleBeta, "beta interval must satisfy 0 <= lo <= up <= 1");
    const BoundTables at_lo = bound_tables(ranking, band, beta_lo);
    const BoundTables at_up = bound_tables(ranking, band, beta_up);
    return interval_bounds_from_tables(ranking, at_lo, at_up, 0.5 * (beta_lo + beta_up));
}

// ---------------------------------------------------------------------------
// Flipped estimation from known negatives
// ---------------------------------------------------------------------------

namespace detail {

inline ContingencyTable transpose(const ContingencyTable& t) noexcept {
    return {t.tn, t.fn, t.fp, t.tp};
}

} // namespace detail

/// Bound tables estimated from the known negatives. The pipeline runs on
/// flip_ranking(ranking) (labels swapped, order reversed) with
/// 1 - beta as the latent fraction; the flipped table at rank n - r is the
/// original table at rank r with tp<->tn and fp<->fn. `band_on_negatives`
/// is a band over the flipped ranking (e.g. bootstrap_band(flip_ranking(r))).
inline BoundTables flipped_bounds(const Ranking& ranking, const CdfBand& band_on_negatives, double beta_hat) {
    if (ranking.n_neg_labeled() < 2)
        throw Error(ErrorCode::InsufficientNegatives, "flipped estimation needs at least 2 known negatives");
    const std::size_t n = ranking.size();
    const std::size_t u = ranking.n_unlabeled();
    const std::size_t p = surrogate_count(beta_hat, u);
    const Ranking flipped = flip_ranking(ranking);
    const double beta_bar = u == 0 ? 1.0 - beta_hat : static_cast<double>(u - p) / static_cast<double>(u);
    const BoundTables f = bound_tables(flipped, band_on_negatives, beta_bar);
    if (f.surrogate_positives != u - p)
        throw Error(ErrorCode::InternalInconsistency, "flipped surrogate count mismatch");

    BoundTables out;
    out.fpr_lower.resize(n + 1);
    out.fpr_upper.resize(n + 1);
    out.infeasible_lower.resize(n + 1);
    out.infeasible_upper.resize(n + 1);
    out.clipped_lower.resize(n + 1);
    out.clipped_upper.resize(n + 1);
    out.surrogate_positives = p;
    out.beta_hat = beta_hat;
    for (std::size_t r = 0; r <= n; ++r) {
        const std::size_t rf = n - r;
        out.fpr_lower[r] = detail::transpose(f.fpr_lower[rf]);
        out.fpr_upper[r] = detail::transpose(f.fpr_upper[rf]);
        out.infeasible_lower[r] = f.infeasible_lower[rf];
        out.infeasible_upper[r] = f.infeasible_upper[rf];
        out.clipped_lower[r] = f.clipped_lower[rf];
        out.clipped_upper[r] = f.clipped_upper[rf];
    }
    return out;
}

inline BoundTables flipped_bounds(const Ranking& ranking, const CdfBand& band_on_negatives, const BetaSpec& beta) {
    beta.validate();
    return flipped_bounds(ranking, band_on_negatives, beta.beta_hat);
}

/// Interval bounds in flipped mode. Overestimating beta underestimates
/// performance here, so the lower curves come from beta_up and the upper
/// curves from beta_lo.
inline IntervalBounds flipped_interval_bounds(const Ranking& ranking, const CdfBand& band_on_negatives,
                                              double beta_lo, double beta_up) {
    if (!(beta_lo >= 0.0 && beta_lo <= beta_up && beta_up <= 1.0))
        throw Error(ErrorCode::InfeasibleBeta, "beta interval must satisfy 0 <= lo <= up <= 1");
    const BoundTables from_up = flipped_bounds(ranking, band_on_negatives, beta_up);
    const BoundTables from_lo = flipped_bounds(ranking, band_on_negatives, beta_lo);
    return interval_bounds_from_tables(ranking, from_up, from_lo, 0.5 * (beta_lo + beta_up));
}

enum class BoundSource { Direct, Flipped };

constexpr std::string_view to_string(BoundSource s) noexcept {
    return s == BoundSource::Direct ? "direct" : "flipped";
}

struct TightestInterval {
    AucInterval interval;
    BoundSource source = BoundSource::Direct;
};

/// Narrower of the two intervals; equal widths go to the direct estimate.
inline TightestInterval tightest_bounds(std::optional<AucInterval> direct, std::optional<AucInterval> flipped) {
    if (!direct && !flipped) throw Error(ErrorCode::InvalidArgument, "no interval available");
    if (!flipped) return {*direct, BoundSource::Direct};
    if (!direct) return {*flipped, BoundSource::Flipped};
    if (flipped->width() < direct->width()) return {*flipped, BoundSource::Flipped};
    return {*direct, BoundSource::Direct};
}

// ---------------------------------------------------------------------------
// Sensitivity of the unlabeled partial table to beta
// ---------------------------------------------------------------------------

enum class BandSide { Lower, Upper };

/// Unlabeled partial table with theta relaxed to beta * T(r) * |U| (no
/// rounding, no clipping).
struct RelaxedTable {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    double tn = 0.0;
};

inline RelaxedTable relaxed_unlabeled_table(double beta_hat, double t, std::size_t top_u, std::size_t u_size) {
    const double u = static_cast<double>(u_size);
    const double theta = beta_hat * t * u;
    return {theta, static_cast<double>(top_u) - theta, beta_hat * u - theta,
            (1.0 - beta_hat + beta_hat * t) * u - static_cast<double>(top_u)};
}

struct RankSensitivity {
    double dtpr_dbeta = 0.0;
    double dfpr_dbeta = 0.0;
    std::optional<double> dprec_dbeta;  ///< absent when |top(U, r)| = 0
    bool clipped = false;
};

struct SensitivityReport {
    BandSide side = BandSide::Upper;
    double beta_hat = 0.0;
    std::vector<RankSensitivity> ranks;  ///< indexed by rank 0..n
};

/// Per-rank derivatives of the unlabeled TPR, FPR and precision with respect
/// to beta under the relaxation theta = beta * T(r) * |U|:
///   dTPR/dbeta  = 0
///   dFPR/dbeta  = (|top(U, r)| / |U| - T(r)) / (1 - beta)^2
///   dPREC/dbeta = T(r) |U| / |top(U, r)|
/// Ranks where the corner cases would clip theta report all zeros.
inline SensitivityReport sensitivity(const Ranking& ranking, const CdfBand& band, double beta_hat, BandSide side) {
    if (!(beta_hat > 0.0 && beta_hat < 1.0))
        throw Error(ErrorCode::InvalidArgument, "sensitivity needs beta in (0, 1)");
    const std::size_t n = ranking.size();
    if (band.ranks() != n) throw Error(ErrorCode::InvalidArgument, "band does not cover the ranking");
    const std::size_t u = ranking.n_unlabeled();
    if (u == 0) throw Error(ErrorCode::InvalidArgument, "sensitivity needs unlabeled examples");
    const double ud = static_cast<double>(u);

    SensitivityReport out;
    out.side = side;
    out.beta_hat = beta_hat;
    out.ranks.resize(n + 1);
    for (std::size_t r = 0; r <= n; ++r) {
        const double t = side == BandSide::Upper ? band.upper(r) : band.lower(r);
        const std::size_t top_u = ranking.top_count(Label::Unlabeled, r);
        const double bottom_u = static_cast<double>(u - top_u);
        const double theta = beta_hat * t * ud;
        RankSensitivity& s = out.ranks[r];
        s.clipped = theta > static_cast<double>(top_u) || beta_hat * ud - theta > bottom_u;
        if (s.clipped) {
            s.dprec_dbeta = 0.0;
            continue;
        }
        const double one_minus = 1.0 - beta_hat;
        s.dfpr_dbeta = (static_cast<double>(top_u) / ud - t) / (one_minus * one_minus);
        if (top_u > 0) s.dprec_dbeta = t * ud / static_cast<double>(top_u);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Beta sweeps and model comparison
// ---------------------------------------------------------------------------

struct SweepPoint {
    double beta = 0.0;
    AucInterval roc;
    AucInterval pr;
    std::size_t infeasible_ranks = 0;
    std::size_t clipped_ranks = 0;
    std::optional<BoundCurve> roc_curve;
    std::optional<BoundCurve> pr_curve;
};

struct BetaSweepResult {
    std::vector<double> beta_values;
    std::vector<SweepPoint> points;
};

inline void validate_beta_grid(std::span<const double> grid) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "beta grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw Error(ErrorCode::InfeasibleBeta, "beta grid value outside [0, 1]");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "beta grid must be strictly increasing");
    }
}

inline BetaSweepResult sweep_beta(const Ranking& ranking, const CdfBand& band, std::span<const double> grid,
                                  bool keep_curves = false) {
    validate_beta_grid(grid);
    BetaSweepResult out;
    out.beta_values.assign(grid.begin(), grid.end());
    out.points.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const BoundTables tables = bound_tables(ranking, band, grid[i]);
        BoundCurve roc = roc_bounds(tables);
        BoundCurve pr = pr_bounds(tables);
        SweepPoint& pt = out.points[i];
        pt.beta = grid[i];
        pt.roc = auc_interval(roc);
        pt.pr = auc_interval(pr);
        pt.infeasible_ranks = tables.infeasible_count();
        pt.clipped_ranks = static_cast<std::size_t>(
            std::count(tables.clipped_lower.begin(), tables.clipped_lower.end(), true) +
            std::count(tables.clipped_upper.begin(), tables.clipped_upper.end(), true));
        if (keep_curves) {
            pt.roc_curve = std::move(roc);
            pt.pr_curve = std::move(pr);
        }
    });
    return out;
}

struct OrderingSwitch {
    std::size_t model_a = 0;
    std::size_t model_b = 0;
    bool by_midpoint = false;
    bool by_lower = false;
    bool by_upper = false;
};

struct ModelComparison {
    CurveSpace space = CurveSpace::Roc;
    std::vector<double> beta_values;
    /// intervals[m][g]: AUC interval of model m at beta_values[g].
    std::vector<std::vector<AucInterval>> intervals;
    /// Model indices, best first, per grid point.
    std::vector<std::vector<std::size_t>> order_by_midpoint;
    std::vector<std::vector<std::size_t>> order_by_lower;
    std::vector<std::vector<std::size_t>> order_by_upper;
    std::vector<OrderingSwitch> switches;  ///< one entry per model pair
    bool any_switch = false;               ///< headline: midpoint ordering
};

namespace detail {

inline bool same_examples(const Ranking& a, const Ranking& b) {
    if (a.size() != b.size()) return false;
    auto key = [](const Ranking& r) {
        std::vector<std::pair<std::size_t, int>> v;
        v.reserve(r.size());
        for (const auto& e : r.examples()) v.emplace_back(e.source_index, static_cast<int>(e.label));
        std::sort(v.begin(), v.end());
        return v;
    };
    return key(a) == key(b);
}

template <class Value>
std::vector<std::size_t> order_desc(std::size_t models, Value value) {
    std::vector<std::size_t> idx(models);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return value(a) > value(b); });
    return idx;
}

template <class Value>
bool pair_switches(std::size_t grid_size, Value diff) {
    bool a_ahead = false, b_ahead = false;
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double d = diff(g);
        if (d > 0) a_ahead = true;
        if (d < 0) b_ahead = true;
    }
    return a_ahead && b_ahead;
}

} // namespace detail

/// AUC intervals of several models over a beta grid, with orderings per grid
/// point and a flag for every model pair whose ordering flips somewhere.
/// All rankings must cover the same examples (same source_index and label).
inline ModelComparison compare_models(std::span<const Ranking> rankings, std::span<const CdfBand> bands,
                                      std::span<const double> grid, CurveSpace space = CurveSpace::Roc) {
    if (rankings.size() < 2) throw Error(ErrorCode::InvalidArgument, "comparison needs at least two models");
    if (bands.size() != rankings.size()) throw Error(ErrorCode::InvalidArgument, "one band per model required");
    validate_beta_grid(grid);
    for (std::size_t m = 1; m < rankings.size(); ++m)
        if (!detail::same_examples(rankings[0], rankings[m]))
            throw Error(ErrorCode::IncomparableModels, "models rank different example sets");

    const std::size_t models = rankings.size();
    ModelComparison out;
    out.space = space;
    out.beta_values.assign(grid.begin(), grid.end());
    out.intervals.assign(models, std::vector<AucInterval>(grid.size()));
    parallel_for(models * grid.size(), [&](std::size_t job) {
        const std::size_t m = job / grid.size();
        const std::size_t g = job % grid.size();
        const BoundTables tables = bound_tables(rankings[m], bands[m], grid[g]);
        out.intervals[m][g] = auc_interval(curve_bounds(tables, space));
    });

    for (std::size_t g = 0; g < grid.size(); ++g) {
        out.order_by_midpoint.push_back(
            detail::order_desc(models, [&](std::size_t m) { return out.intervals[m][g].midpoint(); }));
        out.order_by_lower.push_back(detail::order_desc(models, [&](std::size_t m) { return out.intervals[m][g].lower; }));
        out.order_by_upper.push_back(detail::order_desc(models, [&](std::size_t m) { return out.intervals[m][g].upper; }));
    }
    for (std::size_t a = 0; a < models; ++a) {
        for (std::size_t b = a + 1; b < models; ++b) {
            OrderingSwitch s{a, b};
            const auto& ia = out.intervals[a];
            const auto& ib = out.intervals[b];
            s.by_midpoint = detail::pair_switches(grid.size(), [&](std::size_t g) { return ia[g].midpoint() - ib[g].midpoint(); });
            s.by_lower = detail::pair_switches(grid.size(), [&](std::size_t g) { return ia[g].lower - ib[g].lower; });
            s.by_upper = detail::pair_switches(grid.size(), [&](std::size_t g) { return ia[g].upper - ib[g].upper; });
            out.any_switch = out.any_switch || s.by_midpoint;
            out.switches.push_back(s);
        }
    }
    return out;
}

} // namespace pueval

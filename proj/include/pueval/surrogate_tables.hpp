#pragma once

#include <pueval/cdf_band.hpp>
#include <pueval/error.hpp>
#include <pueval/parallel.hpp>
#include <pueval/ranking.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace pueval {

/// Slack, in units of examples, applied before ceil/floor of T(r) * |P_U*|
/// so that products like 0.3 * 10 = 3.0000000000000004 do not cross an
/// integer. Anything comparing a TPR against a band value uses the same slack.
inline constexpr double kCountTolerance = 1e-9;

/// Estimate of the latent-positive fraction of the unlabeled set, with an
/// optional interval around it.
struct BetaSpec {
    double beta_hat = 0.0;
    std::optional<double> beta_lo;
    std::optional<double> beta_up;

    void validate() const {
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in_unit(beta_hat)) throw Error(ErrorCode::InfeasibleBeta, "beta must lie in [0, 1]");
        if (beta_lo.has_value() != beta_up.has_value())
            throw Error(ErrorCode::InvalidArgument, "beta interval needs both ends");
        if (beta_lo && !(in_unit(*beta_lo) && in_unit(*beta_up) && *beta_lo <= beta_hat && beta_hat <= *beta_up))
            throw Error(ErrorCode::InfeasibleBeta, "beta interval must satisfy 0 <= lo <= beta <= up <= 1");
    }
};

/// |P_U*| = floor(beta * |U| + 0.5).
inline std::size_t surrogate_count(double beta_hat, std::size_t u_size) {
    if (!(beta_hat >= 0.0 && beta_hat <= 1.0)) throw Error(ErrorCode::InfeasibleBeta, "beta must lie in [0, 1]");
    const auto p = static_cast<std::size_t>(std::floor(beta_hat * static_cast<double>(u_size) + 0.5));
    return std::min(p, u_size);
}

struct ContingencyTable {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t positives() const noexcept { return tp + fn; }
    std::size_t negatives() const noexcept { return fp + tn; }
    std::size_t predicted_positive() const noexcept { return tp + fp; }

    // Callers guarantee nonzero denominators (curves check up front).
    double tpr() const noexcept { return static_cast<double>(tp) / static_cast<double>(positives()); }
    double fpr() const noexcept { return static_cast<double>(fp) / static_cast<double>(negatives()); }
    double precision() const noexcept { return static_cast<double>(tp) / static_cast<double>(predicted_positive()); }

    friend ContingencyTable operator+(const ContingencyTable& a, const ContingencyTable& b) noexcept {
        return {a.tp + b.tp, a.fp + b.fp, a.fn + b.fn, a.tn + b.tn};
    }
    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Per-rank tables (ranks 0..n) realizing the greatest lower bound
/// (`fpr_lower`) and least upper bound (`fpr_upper`) on FPR.
struct BoundTables {
    std::vector<ContingencyTable> fpr_lower;
    std::vector<ContingencyTable> fpr_upper;
    /// Rank where the band constraint could not be met and the fallback
    /// (all of top(U, r), resp. bottom(U, r), surrogate positive) was used.
    std::vector<bool> infeasible_lower;
    std::vector<bool> infeasible_upper;
    /// Rank where either corner case clipped theta.
    std::vector<bool> clipped_lower;
    std::vector<bool> clipped_upper;
    std::size_t surrogate_positives = 0;
    double beta_hat = 0.0;

    std::size_t ranks() const noexcept { return fpr_lower.size() - 1; }
    std::size_t infeasible_count() const {
        return static_cast<std::size_t>(std::count(infeasible_lower.begin(), infeasible_lower.end(), true) +
                                        std::count(infeasible_upper.begin(), infeasible_upper.end(), true));
    }
};

namespace detail {

inline std::size_t clamp_theta(double value, std::size_t p_star_size) {
    if (value <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(value), p_star_size);
}

} // namespace detail

/// Surrogate positives required above rank r for the FPR-lower table:
/// ceil(T_ub(r) * |P_U*|), clamped to [0, |P_U*|].
inline std::size_t theta_upper(double t_ub, std::size_t p_star_size) {
    return detail::clamp_theta(std::ceil(t_ub * static_cast<double>(p_star_size) - kCountTolerance), p_star_size);
}

inline std::size_t theta_upper(double t_ub, double beta_hat, std::size_t u_size) {
    return theta_upper(t_ub, surrogate_count(beta_hat, u_size));
}

/// floor(T_lb(r) * |P_U*|), clamped to [0, |P_U*|]; used for the FPR-upper table.
inline std::size_t theta_lower(double t_lb, std::size_t p_star_size) {
    return detail::clamp_theta(std::floor(t_lb * static_cast<double>(p_star_size) + kCountTolerance), p_star_size);
}

inline std::size_t theta_lower(double t_lb, double beta_hat, std::size_t u_size) {
    return theta_lower(t_lb, surrogate_count(beta_hat, u_size));
}

/// |top(P_U*, r)| given theta and the split of U at rank r. Handles both
/// corner cases: too few unlabeled examples above r to hold theta
/// surrogates, and too few below r to hold the remaining |P_U*| - theta.
inline std::size_t surrogate_top_count(std::size_t theta, std::size_t p_star_size, std::size_t top_u,
                                       std::size_t bottom_u) {
    if (p_star_size > top_u + bottom_u)
        throw Error(ErrorCode::InfeasibleBeta, "more surrogate positives than unlabeled examples");
    theta = std::min(theta, p_star_size);
    if (p_star_size - theta <= bottom_u) return std::min(top_u, theta);
    return p_star_size - bottom_u;
}

/// Unlabeled part of the contingency table at rank r given how many surrogate
/// positives sit at or above r.
inline ContingencyTable unlabeled_partial_table(std::size_t r, std::size_t top_u, std::size_t u_size,
                                                std::size_t p_star_size, std::size_t top_p_star) {
    if (top_u > r || top_u > u_size || p_star_size > u_size || top_p_star > top_u || top_p_star > p_star_size ||
        (u_size - p_star_size) < (top_u - top_p_star))
        throw Error(ErrorCode::InternalInconsistency, "unlabeled partial table would have a negative entry");
    ContingencyTable t;
    t.tp = top_p_star;
    t.fn = p_star_size - top_p_star;
    t.fp = top_u - top_p_star;
    t.tn = (u_size - p_star_size) - t.fp;
    return t;
}

/// Labeled part of the table at rank r, counted directly.
inline ContingencyTable labeled_partial_table(const Ranking& ranking, std::size_t r) {
    return {ranking.top_count(Label::KnownPositive, r), ranking.top_count(Label::KnownNegative, r),
            ranking.bottom_count(Label::KnownPositive, r), ranking.bottom_count(Label::KnownNegative, r)};
}

/// Classical table at rank r when every unlabeled example is treated as
/// negative (or, with `unlabeled_positive`, as positive).
inline ContingencyTable unlabeled_as_class_table(const Ranking& ranking, std::size_t r, bool unlabeled_positive) {
    const std::size_t u = ranking.n_unlabeled();
    const std::size_t top_u = ranking.top_count(Label::Unlabeled, r);
    const std::size_t p = unlabeled_positive ? u : 0;
    return labeled_partial_table(ranking, r) +
           unlabeled_partial_table(r, top_u, u, p, unlabeled_positive ? top_u : 0);
}

/// Greatest-lower-bound and least-upper-bound FPR tables at every rank.
/// Pure integer arithmetic on set sizes; U is never partitioned explicitly.
inline BoundTables bound_tables(const Ranking& ranking, const CdfBand& band, double beta_hat) {
    const std::size_t n = ranking.size();
    if (band.ranks() != n) throw Error(ErrorCode::InvalidArgument, "band does not cover the ranking");
    const std::size_t u = ranking.n_unlabeled();
    const std::size_t p = surrogate_count(beta_hat, u);

    BoundTables out;
    out.fpr_lower.resize(n + 1);
    out.fpr_upper.resize(n + 1);
    out.infeasible_lower.assign(n + 1, false);
    out.infeasible_upper.assign(n + 1, false);
    out.clipped_lower.assign(n + 1, false);
    out.clipped_upper.assign(n + 1, false);
    out.surrogate_positives = p;
    out.beta_hat = beta_hat;

    for (std::size_t r = 0; r <= n; ++r) {
        const ContingencyTable labeled = labeled_partial_table(ranking, r);
        const std::size_t top_u = ranking.top_count(Label::Unlabeled, r);
        const std::size_t bottom_u = u - top_u;

        const std::size_t theta_hi = theta_upper(band.upper(r), p);
        const std::size_t top_hi = surrogate_top_count(theta_hi, p, top_u, bottom_u);
        out.fpr_lower[r] = labeled + unlabeled_partial_table(r, top_u, u, p, top_hi);
        out.infeasible_lower[r] = theta_hi > top_u;
        out.clipped_lower[r] = top_hi != theta_hi;

        const std::size_t theta_lo = theta_lower(band.lower(r), p);
        const std::size_t top_lo = surrogate_top_count(theta_lo, p, top_u, bottom_u);
        out.fpr_upper[r] = labeled + unlabeled_partial_table(r, top_u, u, p, top_lo);
        out.infeasible_upper[r] = p - theta_lo > bottom_u;
        out.clipped_upper[r] = top_lo != theta_lo;
    }
    return out;
}

inline BoundTables bound_tables(const Ranking& ranking, const CdfBand& band, const BetaSpec& beta) {
    beta.validate();
    return bound_tables(ranking, band, beta.beta_hat);
}

/// Classical per-rank tables for a fully known positive set, given as a
/// per-rank membership mask (mask[r - 1] true when the example at rank r is
/// positive).
inline std::vector<ContingencyTable> classical_tables(const std::vector<bool>& positive_at_rank) {
    const std::size_t n = positive_at_rank.size();
    const auto total_pos = static_cast<std::size_t>(std::count(positive_at_rank.begin(), positive_at_rank.end(), true));
    std::vector<ContingencyTable> tables(n + 1);
    std::size_t tp = 0;
    for (std::size_t r = 0; r <= n; ++r) {
        if (r > 0 && positive_at_rank[r - 1]) ++tp;
        tables[r] = {tp, r - tp, total_pos - tp, (n - total_pos) - (r - tp)};
    }
    return tables;
}

} // namespace pueval

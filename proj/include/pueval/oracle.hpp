#pragma once

#include <pueval/cdf_band.hpp>
#include <pueval/error.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace pueval {

inline constexpr std::size_t kOracleMaxUnlabeled = 20;
inline constexpr std::size_t kOracleMaxSurrogates = 10;

/// Exhaustive bounds at one rank, found by trying every subset of U of the
/// surrogate size as the latent positives.
struct OracleBounds {
    ContingencyTable lower_table;  ///< greatest lower bound on FPR
    ContingencyTable upper_table;  ///< least upper bound on FPR
    double min_fpr = 0.0;          ///< FPR of lower_table
    double max_fpr = 0.0;          ///< FPR of upper_table
    bool lower_fallback = false;   ///< no subset met TPR >= T_ub(r)
    bool upper_fallback = false;   ///< no subset met TPR <= T_lb(r)
};

/// Any subset P* with TPR(P*, r) >= T_ub(r) has TPR at least that of the
/// latent positives, so its FPR is a valid lower bound; the greatest such
/// bound is the maximum FPR over those subsets. Symmetrically the least upper
/// bound is the minimum FPR over subsets with TPR(P*, r) <= T_lb(r). When a
/// constraint set is empty, the lower side keeps only subsets containing all
/// of top(U, r) and the upper side only subsets containing all of bottom(U, r).
inline OracleBounds brute_force_bounds(const Ranking& ranking, const CdfBand& band, double beta_hat, std::size_t r) {
    ranking.check_rank(r);
    if (band.ranks() != ranking.size()) throw Error(ErrorCode::InvalidArgument, "band does not cover the ranking");
    const std::size_t u = ranking.n_unlabeled();
    const std::size_t p = surrogate_count(beta_hat, u);
    if (u > kOracleMaxUnlabeled || p > kOracleMaxSurrogates)
        throw Error(ErrorCode::OracleTooLarge, "brute force limited to |U| <= 20 and |P_U*| <= 10");

    // Is the i-th unlabeled example (in rank order) at or above rank r?
    std::vector<bool> unlabeled_top;
    for (std::size_t i = 1; i <= ranking.size(); ++i)
        if (ranking.at_rank(i).label == Label::Unlabeled) unlabeled_top.push_back(i <= r);

    std::size_t labeled_tp = 0, labeled_fp = 0;
    for (std::size_t i = 1; i <= r; ++i) {
        const Label l = ranking.at_rank(i).label;
        if (l == Label::KnownPositive) ++labeled_tp;
        if (l == Label::KnownNegative) ++labeled_fp;
    }
    const std::size_t positives = ranking.n_pos_labeled() + p;
    const std::size_t negatives = ranking.size() - positives;
    auto table_for = [&](std::size_t top_star) {
        ContingencyTable t;
        t.tp = labeled_tp + top_star;
        t.fp = r - t.tp;
        t.fn = positives - t.tp;
        t.tn = negatives - t.fp;
        return t;
    };

    const double pd = static_cast<double>(p);
    const double t_ub = band.upper(r);
    const double t_lb = band.lower(r);

    std::optional<std::size_t> lower_pick, upper_pick, lower_fb, upper_fb;
    std::vector<bool> chosen(u, false);
    std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(p), true);
    // prev_permutation from the "all leading true" state visits every size-p subset once.
    do {
        std::size_t top_star = 0;
        bool has_all_top = true, has_all_bottom = true;
        for (std::size_t i = 0; i < u; ++i) {
            if (chosen[i] && unlabeled_top[i]) ++top_star;
            if (!chosen[i] && unlabeled_top[i]) has_all_top = false;
            if (!chosen[i] && !unlabeled_top[i]) has_all_bottom = false;
        }
        const double top = static_cast<double>(top_star);
        // TPR(P*, r) = top / p compared against the band in count units.
        const bool meets_upper = p == 0 || top >= t_ub * pd - kCountTolerance;
        const bool meets_lower = p == 0 || top <= t_lb * pd + kCountTolerance;
        // Fewer surrogates above r means more false positives.
        if (meets_upper && (!lower_pick || top_star < *lower_pick)) lower_pick = top_star;
        if (meets_lower && (!upper_pick || top_star > *upper_pick)) upper_pick = top_star;
        if (has_all_top && (!lower_fb || top_star < *lower_fb)) lower_fb = top_star;
        if (has_all_bottom && (!upper_fb || top_star > *upper_fb)) upper_fb = top_star;
    } while (std::prev_permutation(chosen.begin(), chosen.end()));

    OracleBounds out;
    out.lower_fallback = !lower_pick.has_value();
    out.upper_fallback = !upper_pick.has_value();
    out.lower_table = table_for(lower_pick ? *lower_pick : lower_fb.value());
    out.upper_table = table_for(upper_pick ? *upper_pick : upper_fb.value());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.min_fpr = negatives ? out.lower_table.fpr() : nan;
    out.max_fpr = negatives ? out.upper_table.fpr() : nan;
    return out;
}

inline OracleBounds brute_force_bounds(const Ranking& ranking, const CdfBand& band, const BetaSpec& beta,
                                       std::size_t r) {
    beta.validate();
    return brute_force_bounds(ranking, band, beta.beta_hat, r);
}

} // namespace pueval

#pragma once

#include <pueval/error.hpp>
#include <pueval/parallel.hpp>
#include <pueval/ranking.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pueval {

inline constexpr std::size_t kDefaultResamples = 2000;
inline constexpr double kDefaultConfidence = 0.95;

/// Confidence band (T_lb, T_ub) on the rank CDF of latent positives, indexed
/// by rank 0..n. Invariants are checked on construction:
/// 0 <= lower <= upper <= 1, both nondecreasing, lower(0) = 0, upper(n) = 1.
class CdfBand {
public:
    static CdfBand from_bounds(std::vector<double> lower, std::vector<double> upper,
                               double confidence_level = 1.0, std::size_t resamples = 0,
                               std::uint64_t seed = 0) {
        if (lower.size() != upper.size() || lower.size() < 2)
            throw Error(ErrorCode::InvalidArgument, "band bounds must cover ranks 0..n with n >= 1");
        for (std::size_t r = 0; r < lower.size(); ++r) {
            if (!(lower[r] >= 0.0 && lower[r] <= upper[r] && upper[r] <= 1.0))
                throw Error(ErrorCode::InvalidArgument, "band violates 0 <= T_lb <= T_ub <= 1 at rank " + std::to_string(r));
            if (r > 0 && (lower[r] < lower[r - 1] || upper[r] < upper[r - 1]))
                throw Error(ErrorCode::InvalidArgument, "band is not nondecreasing at rank " + std::to_string(r));
        }
        if (lower.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "T_lb(0) must be 0");
        if (upper.back() != 1.0) throw Error(ErrorCode::InvalidArgument, "T_ub(n) must be 1");
        return CdfBand(std::move(lower), std::move(upper), confidence_level, resamples, seed);
    }

    std::size_t ranks() const noexcept { return lower_.size() - 1; }
    double lower(std::size_t r) const { return lower_.at(r); }
    double upper(std::size_t r) const { return upper_.at(r); }
    const std::vector<double>& lower_values() const noexcept { return lower_; }
    const std::vector<double>& upper_values() const noexcept { return upper_; }

    /// 1.0 for bands that carry no sampling uncertainty (degenerate band).
    double confidence_level() const noexcept { return level_; }
    std::size_t resamples() const noexcept { return resamples_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// True when T_lb(r) <= cdf(r) <= T_ub(r) at every rank.
    bool contains(const RankCdf& cdf) const {
        if (cdf.ranks() != ranks()) throw Error(ErrorCode::InvalidArgument, "band and CDF cover different rankings");
        for (std::size_t r = 0; r <= ranks(); ++r) {
            const double v = cdf.at(r);
            if (v < lower_[r] || v > upper_[r]) return false;
        }
        return true;
    }

private:
    CdfBand(std::vector<double> lower, std::vector<double> upper, double level, std::size_t resamples,
            std::uint64_t seed)
        : lower_(std::move(lower)), upper_(std::move(upper)), level_(level), resamples_(resamples), seed_(seed) {}

    std::vector<double> lower_;
    std::vector<double> upper_;
    double level_;
    std::size_t resamples_;
    std::uint64_t seed_;
};

namespace detail {

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7): h = (m - 1) q, Q = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h])
/// on the sorted sample x[0..m-1]. Reorders `sample`.
inline double quantile_type7(std::span<double> sample, double q) {
    const std::size_t m = sample.size();
    if (m == 1) return sample[0];
    const double h = static_cast<double>(m - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(lo), sample.end());
    const double x_lo = sample[lo];
    if (lo + 1 >= m) return x_lo;
    const double x_hi = *std::min_element(sample.begin() + static_cast<std::ptrdiff_t>(lo) + 1, sample.end());
    return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

inline std::uint64_t resample_seed(std::uint64_t seed, std::size_t resample) {
    const auto b = static_cast<std::uint64_t>(resample);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

/// Builds the band from resampled cumulative counts. `cumulative` is laid out
/// column-major: cumulative[j * B + b] is the number of draws in resample b
/// that hit one of the j + 1 highest-ranked known positives. The resampled
/// CDF can only jump at known-positive ranks, so k columns describe it fully.
inline CdfBand band_from_cumulative(const Ranking& ranking, std::vector<double>& cumulative, std::size_t resamples,
                                    double level, std::uint64_t seed) {
    const std::size_t n = ranking.size();
    const std::size_t k = ranking.n_pos_labeled();
    const double alpha = 1.0 - level;
    std::vector<double> q_lower(k), q_upper(k);
    parallel_for(k, [&](std::size_t j) {
        std::span<double> column(cumulative.data() + j * resamples, resamples);
        std::vector<double> scratch(column.begin(), column.end());
        q_lower[j] = quantile_type7(scratch, alpha / 2.0);
        q_upper[j] = quantile_type7(scratch, 1.0 - alpha / 2.0);
    });

    const double kd = static_cast<double>(k);
    std::vector<double> lower(n + 1, 0.0), upper(n + 1, 0.0);
    for (std::size_t r = 1; r <= n; ++r) {
        const std::size_t j = ranking.top_count(Label::KnownPositive, r);
        if (j == 0) continue;
        const double empirical = static_cast<double>(j) / kd;
        // Clamp so the band always contains the point estimate, then repair monotonicity below.
        lower[r] = std::clamp(std::min(q_lower[j - 1] / kd, empirical), 0.0, 1.0);
        upper[r] = std::clamp(std::max(q_upper[j - 1] / kd, empirical), 0.0, 1.0);
    }
    for (std::size_t r = 1; r <= n; ++r) lower[r] = std::max(lower[r], lower[r - 1]);
    for (std::size_t r = n; r-- > 0;) upper[r] = std::min(upper[r], upper[r + 1]);
    upper[n] = 1.0;
    return CdfBand::from_bounds(std::move(lower), std::move(upper), level, resamples, seed);
}

inline void check_band_inputs(const Ranking& ranking, double level) {
    if (ranking.n_pos_labeled() < 2)
        throw Error(ErrorCode::InsufficientPositives, "bootstrap band needs at least 2 known positives");
    if (!(level > 0.0 && level < 1.0))
        throw Error(ErrorCode::InvalidLevel, "confidence level must lie in (0, 1)");
}

} // namespace detail

/// Pointwise percentile bootstrap band on the rank CDF of the known
/// positives. Resample b draws |P_L| ranks with replacement from the ranks of
/// P_L using a generator seeded from (seed, b), so the band is identical for
/// any thread count.
inline CdfBand bootstrap_band(const Ranking& ranking, std::size_t resamples = kDefaultResamples,
                              double confidence_level = kDefaultConfidence, std::uint64_t seed = 0) {
    detail::check_band_inputs(ranking, confidence_level);
    if (resamples < 1) throw Error(ErrorCode::InvalidArgument, "resamples must be >= 1");
    const std::size_t k = ranking.n_pos_labeled();
    std::vector<double> cumulative(k * resamples);
    parallel_for(resamples, [&](std::size_t b) {
        std::mt19937_64 rng(detail::resample_seed(seed, b));
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        std::vector<std::uint32_t> hits(k, 0);
        for (std::size_t i = 0; i < k; ++i) ++hits[pick(rng)];
        std::uint32_t running = 0;
        for (std::size_t j = 0; j < k; ++j) {
            running += hits[j];
            cumulative[j * resamples + b] = running;
        }
    });
    return detail::band_from_cumulative(ranking, cumulative, resamples, confidence_level, seed);
}

/// Band from explicit resamples. multiplicities[b][j] is how often the j-th
/// highest-ranked known positive was drawn in resample b; each row sums to
/// |P_L|. Used to pin down the percentile construction in tests.
inline CdfBand band_from_resamples(const Ranking& ranking, std::span<const std::vector<std::uint32_t>> multiplicities,
                                   double confidence_level) {
    detail::check_band_inputs(ranking, confidence_level);
    const std::size_t k = ranking.n_pos_labeled();
    const std::size_t resamples = multiplicities.size();
    if (resamples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one resample");
    std::vector<double> cumulative(k * resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        const auto& row = multiplicities[b];
        if (row.size() != k) throw Error(ErrorCode::InvalidArgument, "resample row must have |P_L| entries");
        std::uint32_t running = 0;
        for (std::size_t j = 0; j < k; ++j) {
            running += row[j];
            cumulative[j * resamples + b] = running;
        }
        if (running != k) throw Error(ErrorCode::InvalidArgument, "resample row must sum to |P_L|");
    }
    return detail::band_from_cumulative(ranking, cumulative, resamples, confidence_level, 0);
}

/// T_lb = T_ub = empirical rank CDF of the known positives.
inline CdfBand degenerate_band(const Ranking& ranking) {
    if (ranking.n_pos_labeled() == 0)
        throw Error(ErrorCode::InsufficientPositives, "degenerate band needs at least one known positive");
    const RankCdf cdf = rank_cdf(ranking, Label::KnownPositive);
    std::vector<double> values(ranking.size() + 1);
    for (std::size_t r = 0; r <= ranking.size(); ++r) values[r] = cdf.at(r);
    return CdfBand::from_bounds(values, values, 1.0, 0, 0);
}

} // namespace pueval

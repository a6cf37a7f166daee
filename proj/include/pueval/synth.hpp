#pragma once

#include <pueval/beta_analysis.hpp>
#include <pueval/cdf_band.hpp>
#include <pueval/curves.hpp>
#include <pueval/error.hpp>
#include <pueval/parallel.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pueval {

struct ScoreDistribution {
    enum class Kind { Gaussian, Uniform };
    Kind kind = Kind::Gaussian;
    double a = 0.0;  ///< mean, or lower end
    double b = 1.0;  ///< standard deviation, or upper end

    static ScoreDistribution gaussian(double mean, double sd) { return {Kind::Gaussian, mean, sd}; }
    static ScoreDistribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }

    void validate() const {
        if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::InvalidConfig, "distribution parameters must be finite");
        if (kind == Kind::Gaussian && !(b > 0.0)) throw Error(ErrorCode::InvalidConfig, "gaussian sd must be > 0");
        if (kind == Kind::Uniform && !(a < b)) throw Error(ErrorCode::InvalidConfig, "uniform needs a < b");
    }

    template <class Rng>
    double draw(Rng& rng) const {
        if (kind == Kind::Gaussian) return std::normal_distribution<double>(a, b)(rng);
        return std::uniform_real_distribution<double>(a, b)(rng);
    }
};

struct SynthConfig {
    std::size_t n_pos = 1000;
    std::size_t n_neg = 1000;
    ScoreDistribution pos_score = ScoreDistribution::gaussian(1.0, 1.0);
    ScoreDistribution neg_score = ScoreDistribution::gaussian(0.0, 1.0);
    double labeled_pos_fraction = 0.1;
    double labeled_neg_fraction = 0.0;
    std::uint64_t seed = 0;

    std::size_t labeled_positives() const { return round_half_up(labeled_pos_fraction * static_cast<double>(n_pos)); }
    std::size_t labeled_negatives() const { return round_half_up(labeled_neg_fraction * static_cast<double>(n_neg)); }

    void validate() const {
        if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::InvalidConfig, "n_pos and n_neg must be positive");
        if (!(labeled_pos_fraction > 0.0 && labeled_pos_fraction <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "labeled_pos_fraction must lie in (0, 1]");
        if (!(labeled_neg_fraction >= 0.0 && labeled_neg_fraction <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "labeled_neg_fraction must lie in [0, 1]");
        pos_score.validate();
        neg_score.validate();
    }

private:
    static std::size_t round_half_up(double v) { return static_cast<std::size_t>(std::floor(v + 0.5)); }
};

/// Config with a fixed unlabeled set of `unlabeled` examples containing a
/// `beta` fraction of latent positives, plus `labeled_positives` known
/// positives and no known negatives.
inline SynthConfig unlabeled_config(std::size_t unlabeled, double beta, std::size_t labeled_positives,
                                    std::uint64_t seed = 0) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "beta must lie in [0, 1]");
    const auto latent = static_cast<std::size_t>(std::floor(beta * static_cast<double>(unlabeled) + 0.5));
    SynthConfig c;
    c.n_pos = labeled_positives + latent;
    c.n_neg = unlabeled - latent;
    c.labeled_pos_fraction = c.n_pos == 0 ? 0.0 : static_cast<double>(labeled_positives) / static_cast<double>(c.n_pos);
    c.labeled_neg_fraction = 0.0;
    c.seed = seed;
    return c;
}

struct GroundTruth {
    /// True class per example, indexed by source_index.
    std::vector<bool> positive_by_source;
    /// True class of the example at rank r, stored at [r - 1].
    std::vector<bool> positive_at_rank;
    std::vector<ContingencyTable> tables;  ///< classical tables, ranks 0..n
    double auc_roc = 0.0;
    double auc_pr = 0.0;
    std::size_t latent_positives = 0;
    std::size_t unlabeled = 0;
    std::optional<double> beta;  ///< latent_positives / unlabeled; absent when U is empty
    std::optional<RankCdf> latent_cdf;
};

struct SynthDataset {
    Ranking ranking;
    GroundTruth truth;
};

/// Draws scores per class, then labels a uniformly random subset of each
/// class (selected completely at random). Source indices: positives first.
inline SynthDataset generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.n_pos + config.n_neg;
    std::mt19937_64 rng(config.seed);

    std::vector<Example> examples(n);
    std::vector<bool> positive(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        positive[i] = i < config.n_pos;
        examples[i].source_index = i;
        examples[i].label = Label::Unlabeled;
        examples[i].score = positive[i] ? config.pos_score.draw(rng) : config.neg_score.draw(rng);
    }
    auto label_subset = [&](std::size_t first, std::size_t count, std::size_t take, Label label) {
        std::vector<std::size_t> idx(count);
        std::iota(idx.begin(), idx.end(), first);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < take; ++i) examples[idx[i]].label = label;
    };
    label_subset(0, config.n_pos, std::min(config.labeled_positives(), config.n_pos), Label::KnownPositive);
    label_subset(config.n_pos, config.n_neg, std::min(config.labeled_negatives(), config.n_neg), Label::KnownNegative);

    SynthDataset out{build_ranking(examples), {}};
    GroundTruth& truth = out.truth;
    truth.positive_by_source = positive;
    truth.positive_at_rank.resize(n);
    std::vector<std::size_t> latent_ranks;
    for (std::size_t r = 1; r <= n; ++r) {
        const Example& e = out.ranking.at_rank(r);
        truth.positive_at_rank[r - 1] = positive[e.source_index];
        if (e.label == Label::Unlabeled) {
            ++truth.unlabeled;
            if (positive[e.source_index]) latent_ranks.push_back(r);
        }
    }
    truth.latent_positives = latent_ranks.size();
    if (truth.unlabeled > 0)
        truth.beta = static_cast<double>(truth.latent_positives) / static_cast<double>(truth.unlabeled);
    if (!latent_ranks.empty()) truth.latent_cdf = rank_cdf(out.ranking, latent_ranks);
    truth.tables = classical_tables(truth.positive_at_rank);
    truth.auc_roc = curve_auc(truth.tables, CurveSpace::Roc);
    truth.auc_pr = curve_auc(truth.tables, CurveSpace::Pr);
    return out;
}

// ---------------------------------------------------------------------------
// Repeated-experiment study of AUC-interval width
// ---------------------------------------------------------------------------

struct StudyOptions {
    std::size_t repeats = 20;
    std::size_t resamples = kDefaultResamples;
    double confidence_level = kDefaultConfidence;
    /// Beta estimate; the realized true beta of each dataset when absent.
    std::optional<double> beta_hat;
    /// Use the degenerate band instead of the bootstrap band.
    bool degenerate = false;
};

struct RunOutcome {
    std::uint64_t seed = 0;
    AucInterval roc;
    double true_auc = 0.0;
    bool covered = false;     ///< true AUC inside the interval
    bool band_valid = false;  ///< band contains the latent CDF at every rank
};

struct StudyPoint {
    SynthConfig config;
    std::size_t labeled_positives = 0;
    std::size_t unlabeled = 0;
    double mean_width = 0.0;
    std::optional<double> sd_width;        ///< absent for a single repeat
    std::optional<AucInterval> width_ci;   ///< normal 95% CI of the mean width
    double coverage = 0.0;
    double band_valid_fraction = 0.0;
    std::vector<RunOutcome> runs;
};

/// Runs one estimate per (config, repeat). Repeat i uses dataset seed
/// config.seed + i and the same seed for its bootstrap band.
inline RunOutcome run_once(const SynthConfig& config, const StudyOptions& options) {
    const SynthDataset data = generate(config);
    const double beta = options.beta_hat.value_or(data.truth.beta.value_or(0.0));
    const CdfBand band = options.degenerate
                             ? degenerate_band(data.ranking)
                             : bootstrap_band(data.ranking, options.resamples, options.confidence_level, config.seed);
    const BoundTables tables = bound_tables(data.ranking, band, beta);
    RunOutcome run;
    run.seed = config.seed;
    run.roc = auc_interval(roc_bounds(tables));
    run.true_auc = data.truth.auc_roc;
    run.covered = run.roc.contains(run.true_auc);
    run.band_valid = !data.truth.latent_cdf || band.contains(*data.truth.latent_cdf);
    return run;
}

inline std::vector<StudyPoint> convergence_study(std::span<const SynthConfig> grid, const StudyOptions& options) {
    if (options.repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be >= 1");
    for (const auto& c : grid) c.validate();

    std::vector<StudyPoint> out(grid.size());
    std::vector<RunOutcome> runs(grid.size() * options.repeats);
    parallel_for(runs.size(), [&](std::size_t job) {
        SynthConfig c = grid[job / options.repeats];
        c.seed += job % options.repeats;
        runs[job] = run_once(c, options);
    });

    for (std::size_t g = 0; g < grid.size(); ++g) {
        StudyPoint& pt = out[g];
        pt.config = grid[g];
        pt.labeled_positives = grid[g].labeled_positives();
        pt.unlabeled = grid[g].n_pos + grid[g].n_neg - pt.labeled_positives - grid[g].labeled_negatives();
        pt.runs.assign(runs.begin() + static_cast<std::ptrdiff_t>(g * options.repeats),
                       runs.begin() + static_cast<std::ptrdiff_t>((g + 1) * options.repeats));
        const double m = static_cast<double>(options.repeats);
        double sum = 0.0, covered = 0.0, valid = 0.0;
        for (const auto& run : pt.runs) {
            sum += run.roc.width();
            covered += run.covered ? 1.0 : 0.0;
            valid += run.band_valid ? 1.0 : 0.0;
        }
        pt.mean_width = sum / m;
        pt.coverage = covered / m;
        pt.band_valid_fraction = valid / m;
        if (options.repeats > 1) {
            double ss = 0.0;
            for (const auto& run : pt.runs) ss += (run.roc.width() - pt.mean_width) * (run.roc.width() - pt.mean_width);
            pt.sd_width = std::sqrt(ss / (m - 1.0));
            const double half = 1.96 * *pt.sd_width / std::sqrt(m);
            pt.width_ci = AucInterval{pt.mean_width - half, pt.mean_width + half};
        }
    }
    return out;
}

} // namespace pueval

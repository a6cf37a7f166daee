#pragma once

#include <pueval/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace pueval {

enum class Label { KnownPositive, KnownNegative, Unlabeled };

struct Example {
    double score = 0.0;
    Label label = Label::Unlabeled;
    /// Position in the original input; breaks score ties.
    std::size_t source_index = 0;
};

/// Examples sorted by descending score (ties: ascending source_index).
/// Ranks are 1-based; rank 0 means "nothing predicted positive". Per-label
/// prefix counts make top/bottom partition queries O(1).
class Ranking {
public:
    const std::vector<Example>& examples() const noexcept { return examples_; }
    const Example& at_rank(std::size_t r) const { return examples_.at(r - 1); }

    std::size_t size() const noexcept { return examples_.size(); }
    std::size_t count(Label label) const noexcept { return prefix(label).back(); }
    std::size_t n_pos_labeled() const noexcept { return count(Label::KnownPositive); }
    std::size_t n_neg_labeled() const noexcept { return count(Label::KnownNegative); }
    std::size_t n_unlabeled() const noexcept { return count(Label::Unlabeled); }

    /// |top(X, r)| for the set of examples carrying `label`.
    std::size_t top_count(Label label, std::size_t r) const {
        check_rank(r);
        return prefix(label)[r];
    }
    std::size_t bottom_count(Label label, std::size_t r) const {
        return count(label) - top_count(label, r);
    }

    /// Number of examples whose score equals the score of the example ranked
    /// directly above it. Curve points inside a tie block depend on the
    /// tie-breaking order.
    std::size_t tie_count() const noexcept { return ties_; }

    void check_rank(std::size_t r) const {
        if (r > size())
            throw Error(ErrorCode::RankOutOfRange,
                        "rank " + std::to_string(r) + " exceeds ranking size " +
                            std::to_string(size()));
    }

    /// Wraps an already ordered sequence; ranks follow the given order.
    static Ranking from_ordered(std::vector<Example> ordered) {
        if (ordered.empty()) throw Error(ErrorCode::EmptyInput, "ranking needs at least one example");
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            if (!std::isfinite(ordered[i].score))
                throw Error(ErrorCode::InvalidScore,
                            "non-finite score at input index " + std::to_string(ordered[i].source_index),
                            ordered[i].source_index);
        }
        return Ranking(std::move(ordered));
    }

private:
    explicit Ranking(std::vector<Example> ordered) : examples_(std::move(ordered)) {
        const std::size_t n = examples_.size();
        for (auto& p : prefix_) p.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& p : prefix_) p[i + 1] = p[i];
            ++prefix_[index_of(examples_[i].label)][i + 1];
            if (i > 0 && examples_[i].score == examples_[i - 1].score) ++ties_;
        }
    }

    static constexpr std::size_t index_of(Label label) noexcept {
        return static_cast<std::size_t>(label);
    }
    const std::vector<std::size_t>& prefix(Label label) const noexcept {
        return prefix_[index_of(label)];
    }

    std::vector<Example> examples_;
    std::array<std::vector<std::size_t>, 3> prefix_;
    std::size_t ties_ = 0;
};

inline Ranking build_ranking(std::vector<Example> examples) {
    if (examples.empty()) throw Error(ErrorCode::EmptyInput, "ranking needs at least one example");
    for (const auto& e : examples) {
        if (!std::isfinite(e.score))
            throw Error(ErrorCode::InvalidScore,
                        "non-finite score at input index " + std::to_string(e.source_index),
                        e.source_index);
    }
    std::sort(examples.begin(), examples.end(), [](const Example& a, const Example& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.source_index < b.source_index;
    });
    return Ranking::from_ordered(std::move(examples));
}

/// Convenience overload: source_index is the position in the input spans.
inline Ranking build_ranking(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::InvalidArgument, "scores and labels differ in length");
    std::vector<Example> examples(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) examples[i] = {scores[i], labels[i], i};
    return build_ranking(std::move(examples));
}

/// Empirical rank CDF of a set S within a ranking: at(r) = |top(S, r)| / |S|.
/// Counts are kept as integers so comparisons can be exact.
class RankCdf {
public:
    RankCdf(std::vector<std::size_t> cumulative, std::size_t set_size)
        : cumulative_(std::move(cumulative)), set_size_(set_size) {
        if (set_size_ == 0) throw Error(ErrorCode::EmptySet, "rank CDF of an empty set");
        if (cumulative_.empty() || cumulative_.front() != 0 || cumulative_.back() != set_size_ ||
            !std::is_sorted(cumulative_.begin(), cumulative_.end()))
            throw Error(ErrorCode::InternalInconsistency, "cumulative counts are not a CDF");
    }

    /// Ranking size n; valid ranks are 0..n.
    std::size_t ranks() const noexcept { return cumulative_.size() - 1; }
    std::size_t set_size() const noexcept { return set_size_; }

    std::size_t count(std::size_t r) const { return cumulative_.at(r); }
    double at(std::size_t r) const {
        return static_cast<double>(count(r)) / static_cast<double>(set_size_);
    }

    /// values()[r - 1] = at(r) for r in 1..n.
    std::vector<double> values() const {
        std::vector<double> v(ranks());
        for (std::size_t r = 1; r <= ranks(); ++r) v[r - 1] = at(r);
        return v;
    }

    const std::vector<std::size_t>& cumulative() const noexcept { return cumulative_; }

private:
    std::vector<std::size_t> cumulative_;
    std::size_t set_size_;
};

inline RankCdf rank_cdf(const Ranking& ranking, Label label) {
    const std::size_t n = ranking.size();
    std::vector<std::size_t> cumulative(n + 1);
    for (std::size_t r = 0; r <= n; ++r) cumulative[r] = ranking.top_count(label, r);
    if (cumulative.back() == 0) throw Error(ErrorCode::EmptySet, "no examples with the selected label");
    return RankCdf(std::move(cumulative), cumulative.back());
}

/// Rank CDF of an explicit set given by its 1-based ranks (distinct).
inline RankCdf rank_cdf(const Ranking& ranking, std::span<const std::size_t> ranks) {
    if (ranks.empty()) throw Error(ErrorCode::EmptySet, "empty rank set");
    const std::size_t n = ranking.size();
    std::vector<std::size_t> hits(n + 1, 0);
    for (std::size_t r : ranks) {
        if (r == 0 || r > n)
            throw Error(ErrorCode::RankOutOfRange, "rank " + std::to_string(r) + " outside 1.." + std::to_string(n));
        if (hits[r]++ != 0) throw Error(ErrorCode::InvalidArgument, "duplicate rank " + std::to_string(r));
    }
    std::vector<std::size_t> cumulative(n + 1, 0);
    for (std::size_t r = 1; r <= n; ++r) cumulative[r] = cumulative[r - 1] + hits[r];
    return RankCdf(std::move(cumulative), ranks.size());
}

inline std::size_t top_count(const Ranking& ranking, Label label, std::size_t r) {
    return ranking.top_count(label, r);
}

inline std::size_t top_count(const RankCdf& cdf, std::size_t r) {
    if (r > cdf.ranks()) throw Error(ErrorCode::RankOutOfRange, "rank exceeds ranking size");
    return cdf.count(r);
}

inline std::size_t bottom_count(const RankCdf& cdf, std::size_t r) {
    return cdf.set_size() - top_count(cdf, r);
}

/// FPR of a positive set of size pos_size whose TPR at rank r is known:
/// the r predicted positives minus the true positives, over all negatives.
inline double fpr_from_tpr(const Ranking& ranking, std::size_t pos_size, double tpr_at_r, std::size_t r) {
    const std::size_t n = ranking.size();
    if (pos_size >= n) throw Error(ErrorCode::NoNegatives, "positive set covers the whole ranking");
    ranking.check_rank(r);
    if (!(tpr_at_r >= 0.0 && tpr_at_r <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "TPR outside [0, 1]");
    const double tp = tpr_at_r * static_cast<double>(pos_size);
    if (tp > static_cast<double>(r) + 1e-9)
        throw Error(ErrorCode::InvalidArgument, "more true positives than predicted positives");
    const double fpr = (static_cast<double>(r) - tp) / static_cast<double>(n - pos_size);
    return std::clamp(fpr, 0.0, 1.0);
}

/// Label-flipped, order-reversed copy: known negatives become known
/// positives and the bottom of the ranking becomes the top. Rank r in the
/// flipped ranking is rank n + 1 - r in the original.
inline Ranking flip_ranking(const Ranking& ranking) {
    std::vector<Example> ordered(ranking.examples().rbegin(), ranking.examples().rend());
    for (auto& e : ordered) {
        if (e.label == Label::KnownPositive) e.label = Label::KnownNegative;
        else if (e.label == Label::KnownNegative) e.label = Label::KnownPositive;
        e.score = -e.score;
    }
    return Ranking::from_ordered(std::move(ordered));
}

} // namespace pueval

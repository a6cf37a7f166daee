#pragma once

// Helpers shared by the unit tests and the acceptance runner. Everything here
// recomputes quantities from first principles (explicit sets and counting) so
// it can serve as an oracle for the library.

#include <pueval/cdf_band.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace pueval::testing {

// Nine-example ranking: B,E,D,G,H,A,F,C,I with strictly decreasing scores.
inline const std::string kNineOrder = "BEDGHAFCI";

inline std::size_t nine_rank(char name) { return kNineOrder.find(name) + 1; }

/// Nine-example ranking with `positives` as known positives and every other example
/// carrying `rest`. Source indices follow the letters A..I.
inline Ranking nine_ranking(const std::string& positives, Label rest) {
    std::vector<Example> ex;
    for (char c = 'A'; c <= 'I'; ++c) {
        const double score = 1.0 - 0.1 * static_cast<double>(nine_rank(c));
        const Label l = positives.find(c) != std::string::npos ? Label::KnownPositive : rest;
        ex.push_back({score, l, static_cast<std::size_t>(c - 'A')});
    }
    return build_ranking(ex);
}

/// Ranking whose labels are given in rank order; scores n, n-1, ..., 1.
inline Ranking ranking_from_labels(const std::vector<Label>& labels) {
    std::vector<Example> ex;
    for (std::size_t i = 0; i < labels.size(); ++i)
        ex.push_back({static_cast<double>(labels.size() - i), labels[i], i});
    return build_ranking(ex);
}

/// Ranking from an explicit rank order of source indices; sources below
/// `known_positives` are labeled positive, the rest unlabeled.
inline Ranking ranking_from_order(const std::vector<std::size_t>& order, std::size_t known_positives) {
    std::vector<Example> ex(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t s = order[pos];
        ex[s] = {static_cast<double>(order.size() - pos), s < known_positives ? Label::KnownPositive : Label::Unlabeled, s};
    }
    return build_ranking(ex);
}

// Two models over 14 examples (sources 0..2 known positive, 11 unlabeled).
// Model B puts two known positives at ranks 1-2 but the third at rank 8;
// model A spreads them over ranks 2, 5, 6. B wins at beta = 0, A once a few
// unlabeled examples count as positives.
inline std::vector<Ranking> crossing_pair() {
    return {ranking_from_order({1, 9, 10, 5, 0, 2, 7, 3, 12, 6, 11, 4, 13, 8}, 3),
            ranking_from_order({0, 1, 11, 13, 10, 6, 12, 2, 4, 7, 5, 3, 8, 9}, 3)};
}

// Known positives on top versus known positives at the bottom.
inline std::vector<Ranking> dominated_pair() {
    return {ranking_from_order({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13}, 3),
            ranking_from_order({3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 0, 1, 2}, 3)};
}

inline const std::vector<double> kSwitchGrid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

/// Shuffled label sequence with the requested counts.
template <class Rng>
std::vector<Label> random_labels(Rng& rng, std::size_t kp, std::size_t kn, std::size_t u) {
    std::vector<Label> l;
    l.insert(l.end(), kp, Label::KnownPositive);
    l.insert(l.end(), kn, Label::KnownNegative);
    l.insert(l.end(), u, Label::Unlabeled);
    std::shuffle(l.begin(), l.end(), rng);
    return l;
}

/// Arbitrary valid band: nondecreasing, lower <= upper, T_lb(0) = 0, T_ub(n) = 1.
template <class Rng>
CdfBand random_band(Rng& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> a(n + 1), b(n + 1);
    for (std::size_t r = 0; r <= n; ++r) {
        a[r] = unit(rng);
        b[r] = unit(rng);
        if (unit(rng) < 0.3) b[r] = a[r];  // exercise exact-count boundaries
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> lo(n + 1), up(n + 1);
    for (std::size_t r = 0; r <= n; ++r) {
        lo[r] = std::min(a[r], b[r]);
        up[r] = std::max(a[r], b[r]);
    }
    lo[0] = 0.0;
    up[n] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) lo[r] = std::max(lo[r], lo[r - 1]);
    return CdfBand::from_bounds(lo, up);
}

/// Smallest widening of `band` that contains `cdf` at every rank.
inline CdfBand hull_band(const CdfBand& band, const RankCdf& cdf) {
    std::vector<double> lo(band.ranks() + 1), up(band.ranks() + 1);
    for (std::size_t r = 0; r <= band.ranks(); ++r) {
        lo[r] = std::min(band.lower(r), cdf.at(r));
        up[r] = std::max(band.upper(r), cdf.at(r));
    }
    return CdfBand::from_bounds(lo, up, band.confidence_level());
}

/// Contingency table at rank r for an explicit positive set over rank order.
inline ContingencyTable table_by_counting(const std::vector<bool>& positive_at_rank, std::size_t r) {
    ContingencyTable t;
    for (std::size_t i = 0; i < positive_at_rank.size(); ++i) {
        const bool top = i < r;
        if (positive_at_rank[i]) (top ? t.tp : t.fn) += 1;
        else (top ? t.fp : t.tn) += 1;
    }
    return t;
}

/// Fraction of (positive, negative) pairs ordered correctly; ties count 1/2.
inline double mann_whitney_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
    double wins = 0.0;
    for (double p : pos)
        for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// --------------------------------------------------------------------------
// Set-level property checkers. A set is a sorted list of distinct 1-based
// ranks; rationals are compared by cross-multiplication.
// --------------------------------------------------------------------------

struct Frac {
    std::int64_t num;
    std::int64_t den;
};
inline bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }
inline bool operator==(Frac a, Frac b) { return a.num * b.den == b.num * a.den; }
inline bool operator>(Frac a, Frac b) { return b < a; }

inline std::int64_t top_of(const std::vector<std::size_t>& set, std::size_t r) {
    return std::count_if(set.begin(), set.end(), [&](std::size_t x) { return x <= r; });
}
inline Frac tpr_of(const std::vector<std::size_t>& set, std::size_t r) {
    return {top_of(set, r), static_cast<std::int64_t>(set.size())};
}
inline Frac fpr_of(const std::vector<std::size_t>& set, std::size_t n, std::size_t r) {
    return {static_cast<std::int64_t>(r) - top_of(set, r), static_cast<std::int64_t>(n - set.size())};
}

template <class Rng>
std::vector<std::size_t> random_subset(Rng& rng, std::vector<std::size_t> pool, std::size_t k) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline std::vector<std::size_t> iota_ranks(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{1});
    return v;
}

inline std::vector<std::size_t> set_union(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

struct SetTally {
    std::size_t checked = 0;   ///< instances where the premise held
    std::size_t failures = 0;
};

/// Disjoint same-size sets: higher TPR at r implies lower FPR at r.
template <class Rng>
SetTally check_disjoint_sets(Rng& rng, std::size_t instances) {
    SetTally t;
    std::uniform_int_distribution<std::size_t> size_n(3, 16);
    while (t.checked < instances) {
        const std::size_t n = size_n(rng);
        const std::size_t s = std::uniform_int_distribution<std::size_t>(1, (n - 1) / 2)(rng);
        auto both = random_subset(rng, iota_ranks(n), 2 * s);
        std::shuffle(both.begin(), both.end(), rng);
        std::vector<std::size_t> s1(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(s));
        std::vector<std::size_t> s2(both.begin() + static_cast<std::ptrdiff_t>(s), both.end());
        std::sort(s1.begin(), s1.end());
        std::sort(s2.begin(), s2.end());
        for (std::size_t r = 0; r <= n; ++r) {
            if (!(tpr_of(s1, r) > tpr_of(s2, r))) continue;
            ++t.checked;
            if (!(fpr_of(s1, n, r) < fpr_of(s2, n, r))) ++t.failures;
        }
    }
    return t;
}

/// Disjoint sets with TPR(S1) < TPR(S2): the union's TPR lies strictly between.
template <class Rng>
SetTally check_union_between(Rng& rng, std::size_t instances) {
    SetTally t;
    std::uniform_int_distribution<std::size_t> size_n(2, 16);
    while (t.checked < instances) {
        const std::size_t n = size_n(rng);
        const std::size_t s1 = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
        const std::size_t s2 = std::uniform_int_distribution<std::size_t>(1, n - s1)(rng);
        auto both = random_subset(rng, iota_ranks(n), s1 + s2);
        std::shuffle(both.begin(), both.end(), rng);
        std::vector<std::size_t> a(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(s1));
        std::vector<std::size_t> b(both.begin() + static_cast<std::ptrdiff_t>(s1), both.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const auto u = set_union(a, b);
        for (std::size_t r = 0; r <= n; ++r) {
            if (!(tpr_of(a, r) < tpr_of(b, r))) continue;
            ++t.checked;
            if (!(tpr_of(a, r) < tpr_of(u, r) && tpr_of(u, r) < tpr_of(b, r))) ++t.failures;
        }
    }
    return t;
}

/// |S_B| = |S_C|, both disjoint from S_A:
/// TPR(S_B) < TPR(S_C)  <=>  TPR(S_A u S_B) < TPR(S_A u S_C).
template <class Rng>
SetTally check_common_subset(Rng& rng, std::size_t instances) {
    SetTally t;
    std::uniform_int_distribution<std::size_t> size_n(3, 16);
    while (t.checked < instances) {
        const std::size_t n = size_n(rng);
        const std::size_t sa = std::uniform_int_distribution<std::size_t>(1, n - 2)(rng);
        auto a = random_subset(rng, iota_ranks(n), sa);
        std::vector<std::size_t> rest;
        for (std::size_t x = 1; x <= n; ++x)
            if (!std::binary_search(a.begin(), a.end(), x)) rest.push_back(x);
        const std::size_t sb = std::uniform_int_distribution<std::size_t>(1, rest.size())(rng);
        const auto b = random_subset(rng, rest, sb);
        const auto c = random_subset(rng, rest, sb);  // may overlap b
        const auto ab = set_union(a, b), ac = set_union(a, c);
        for (std::size_t r = 0; r <= n; ++r) {
            ++t.checked;
            const bool lhs = tpr_of(b, r) < tpr_of(c, r);
            const bool rhs = tpr_of(ab, r) < tpr_of(ac, r);
            if (lhs != rhs) ++t.failures;
        }
    }
    return t;
}

/// TPR(S1) = TPR(S2) = t with |S1| > |S2|: FPR(S2) < t implies FPR(S1) < FPR(S2)
/// and FPR(S2) > t implies FPR(S1) > FPR(S2). Sets are drawn to hit a shared TPR.
template <class Rng>
SetTally check_larger_set(Rng& rng, std::size_t instances) {
    SetTally t;
    std::uniform_int_distribution<std::size_t> size_n(3, 24);
    while (t.checked < instances) {
        const std::size_t n = size_n(rng);
        const std::size_t r = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
        const std::size_t s2 = std::uniform_int_distribution<std::size_t>(1, n - 2)(rng);
        const std::size_t s1 = std::uniform_int_distribution<std::size_t>(s2 + 1, n - 1)(rng);
        const std::size_t top2 = std::uniform_int_distribution<std::size_t>(0, std::min(r, s2))(rng);
        if ((top2 * s1) % s2 != 0) continue;
        const std::size_t top1 = top2 * s1 / s2;
        auto fits = [&](std::size_t s, std::size_t top) { return top <= r && s - top <= n - r; };
        if (!fits(s1, top1) || !fits(s2, top2)) continue;
        std::vector<std::size_t> upper_ranks = iota_ranks(r), lower_ranks;
        for (std::size_t x = r + 1; x <= n; ++x) lower_ranks.push_back(x);
        auto make = [&](std::size_t s, std::size_t top) {
            auto a = random_subset(rng, upper_ranks, top);
            auto b = random_subset(rng, lower_ranks, s - top);
            return set_union(a, b);
        };
        const auto set1 = make(s1, top1), set2 = make(s2, top2);
        const Frac tp = tpr_of(set2, r);
        const Frac f1 = fpr_of(set1, n, r), f2 = fpr_of(set2, n, r);
        if (!(tpr_of(set1, r) == tp)) {
            ++t.failures;  // construction error
            continue;
        }
        if (f2 < tp) {
            ++t.checked;
            if (!(f1 < f2)) ++t.failures;
        } else if (f2 > tp) {
            ++t.checked;
            if (!(f1 > f2)) ++t.failures;
        }
    }
    return t;
}

} // namespace pueval::testing

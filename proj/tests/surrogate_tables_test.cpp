#include "support.hpp"

#include <pueval/cdf_band.hpp>
#include <pueval/oracle.hpp>
#include <pueval/surrogate_tables.hpp>
#include <pueval/synth.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <random>

using namespace pueval;
using namespace pueval::testing;

namespace {

struct Enumerated {
    ContingencyTable lower;  // greatest lower bound on FPR
    ContingencyTable upper;  // least upper bound on FPR
};

// Tries every size-p subset of U (bitmask over unlabeled examples in rank
// order) and builds each candidate table by counting an explicit positive set.
Enumerated enumerate_bounds(const std::vector<Label>& labels, const CdfBand& band, std::size_t p, std::size_t r) {
    std::vector<std::size_t> u_pos;  // rank index (0-based) of each unlabeled example
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == Label::Unlabeled) u_pos.push_back(i);
    const std::size_t u = u_pos.size();
    std::optional<std::pair<std::size_t, unsigned>> lo, up, lo_fb, up_fb;  // (top, mask)
    for (unsigned mask = 0; mask < (1u << u); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != p) continue;
        std::size_t top = 0;
        bool all_top = true, all_bottom = true;
        for (std::size_t j = 0; j < u; ++j) {
            const bool chosen = mask >> j & 1u, above = u_pos[j] < r;
            top += chosen && above;
            if (!chosen && above) all_top = false;
            if (!chosen && !above) all_bottom = false;
        }
        const double t = static_cast<double>(top), pd = static_cast<double>(p);
        if ((p == 0 || t >= band.upper(r) * pd - 1e-9) && (!lo || top < lo->first)) lo = {{top, mask}};
        if ((p == 0 || t <= band.lower(r) * pd + 1e-9) && (!up || top > up->first)) up = {{top, mask}};
        if (all_top && (!lo_fb || top < lo_fb->first)) lo_fb = {{top, mask}};
        if (all_bottom && (!up_fb || top > up_fb->first)) up_fb = {{top, mask}};
    }
    auto table = [&](unsigned mask) {
        std::vector<bool> pos(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) pos[i] = labels[i] == Label::KnownPositive;
        for (std::size_t j = 0; j < u; ++j)
            if (mask >> j & 1u) pos[u_pos[j]] = true;
        return table_by_counting(pos, r);
    };
    return {table((lo ? lo : lo_fb)->second), table((up ? up : up_fb)->second)};
}

void expect_table_sums(const BoundTables& t, const Ranking& ranking) {
    const std::size_t positives = ranking.n_pos_labeled() + t.surrogate_positives;
    for (std::size_t r = 0; r <= ranking.size(); ++r) {
        for (const auto* table : {&t.fpr_lower[r], &t.fpr_upper[r]}) {
            EXPECT_EQ(table->tp + table->fp, r);
            EXPECT_EQ(table->tp + table->fn, positives);
            EXPECT_EQ(table->fp + table->tn, ranking.size() - positives);
        }
        EXPECT_GE(t.fpr_lower[r].tp, t.fpr_upper[r].tp);  // higher TPR, lower FPR
    }
}

} // namespace

TEST(Theta, Examples) {
    EXPECT_EQ(theta_upper(0.5, 0.2, 10), 1u);
    EXPECT_EQ(theta_upper(0.34, 0.3, 100), 11u);
    EXPECT_EQ(theta_upper(0.0, 0.7, 33), 0u);
    EXPECT_EQ(theta_lower(0.34, 0.3, 100), 10u);
    EXPECT_EQ(theta_lower(1.0, 1.0, 17), 17u);
    EXPECT_EQ(theta_lower(0.5, 0.2, 10), 1u);
}

TEST(Theta, ExactProductsDoNotRoundAcross) {
    // 0.3 * 10 is 3.0000000000000004 in binary floating point
    EXPECT_EQ(theta_upper(0.3, 10), 3u);
    EXPECT_EQ(theta_lower(0.7, 10), 7u);
    EXPECT_EQ(theta_upper(1.0, 5), 5u);
}

TEST(SurrogateTopCount, CornerCases) {
    EXPECT_EQ(surrogate_top_count(5, 6, 2, 8), 2u);
    EXPECT_EQ(surrogate_top_count(5, 9, 7, 3), 6u);
    EXPECT_EQ(surrogate_top_count(3, 5, 10, 10), 3u);
    try {
        surrogate_top_count(1, 5, 2, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleBeta);
    }
}

TEST(SurrogateTopCount, StaysInFeasibleRange) {
    for (std::size_t top_u = 0; top_u <= 6; ++top_u)
        for (std::size_t bottom_u = 0; bottom_u <= 6; ++bottom_u)
            for (std::size_t p = 0; p <= top_u + bottom_u; ++p)
                for (std::size_t theta = 0; theta <= p; ++theta) {
                    const std::size_t got = surrogate_top_count(theta, p, top_u, bottom_u);
                    EXPECT_GE(got + bottom_u, p);
                    EXPECT_LE(got, std::min(top_u, p));
                }
}

TEST(UnlabeledPartialTable, Examples) {
    EXPECT_EQ(unlabeled_partial_table(6, 4, 10, 3, 2), (ContingencyTable{2, 2, 1, 5}));
    EXPECT_EQ(unlabeled_partial_table(6, 4, 10, 0, 0), (ContingencyTable{0, 4, 0, 6}));
    EXPECT_EQ(unlabeled_partial_table(6, 4, 10, 10, 4), (ContingencyTable{4, 0, 6, 0}));
    try {
        unlabeled_partial_table(6, 4, 10, 3, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InternalInconsistency);
    }
    EXPECT_THROW(unlabeled_partial_table(6, 4, 10, 9, 2), Error);  // more negatives above r than exist
}

TEST(SurrogateCount, RoundsHalfUp) {
    EXPECT_EQ(surrogate_count(0.25, 10), 3u);
    EXPECT_EQ(surrogate_count(0.24, 10), 2u);
    EXPECT_EQ(surrogate_count(1.0, 10), 10u);
    EXPECT_EQ(surrogate_count(0.0, 10), 0u);
    EXPECT_THROW(surrogate_count(1.2, 10), Error);
    EXPECT_THROW(surrogate_count(-0.1, 10), Error);
}

TEST(BetaSpec, Validates) {
    EXPECT_NO_THROW((BetaSpec{0.3, 0.2, 0.4}.validate()));
    EXPECT_NO_THROW((BetaSpec{0.3, std::nullopt, std::nullopt}.validate()));
    EXPECT_THROW((BetaSpec{0.5, 0.2, 0.4}.validate()), Error);
    EXPECT_THROW((BetaSpec{0.3, 0.2, std::nullopt}.validate()), Error);
    EXPECT_THROW((BetaSpec{1.5, std::nullopt, std::nullopt}.validate()), Error);
}

TEST(BoundTables, BetaZeroTreatsUnlabeledAsNegative) {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 100; ++it) {
        const Ranking ranking = ranking_from_labels(random_labels(rng, 2 + rng() % 5, rng() % 4, 1 + rng() % 8));
        const CdfBand band = random_band(rng, ranking.size());
        const BoundTables t = bound_tables(ranking, band, 0.0);
        for (std::size_t r = 0; r <= ranking.size(); ++r) {
            const ContingencyTable want = unlabeled_as_class_table(ranking, r, false);
            EXPECT_EQ(t.fpr_lower[r], want);
            EXPECT_EQ(t.fpr_upper[r], want);
        }
    }
}

TEST(BoundTables, FullyLabeledIsClassical) {
    std::mt19937_64 rng(32);
    for (int it = 0; it < 100; ++it) {
        const auto labels = random_labels(rng, 2 + rng() % 5, 1 + rng() % 5, 0);
        const Ranking ranking = ranking_from_labels(labels);
        std::vector<bool> pos(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) pos[i] = labels[i] == Label::KnownPositive;
        const BoundTables t = bound_tables(ranking, bootstrap_band(ranking, 50, 0.9, rng()), 0.4);
        const auto classical = classical_tables(pos);
        for (std::size_t r = 0; r <= ranking.size(); ++r) {
            EXPECT_EQ(t.fpr_lower[r], table_by_counting(pos, r));
            EXPECT_EQ(t.fpr_upper[r], table_by_counting(pos, r));
            EXPECT_EQ(classical[r], table_by_counting(pos, r));
        }
    }
}

// |R| = 8, |P_L| = 2, |U| = 4, beta = 0.5, degenerate band, checked against
// all C(4,2) = 6 latent assignments.
TEST(BoundTables, SmallInstanceAgainstEnumeration) {
    using L = Label;
    const std::vector<Label> labels{L::Unlabeled, L::KnownPositive, L::Unlabeled, L::KnownNegative,
                                    L::Unlabeled, L::KnownPositive, L::KnownNegative, L::Unlabeled};
    const Ranking ranking = ranking_from_labels(labels);
    const CdfBand band = degenerate_band(ranking);
    const BoundTables t = bound_tables(ranking, band, 0.5);
    ASSERT_EQ(t.surrogate_positives, 2u);
    for (std::size_t r = 0; r <= 8; ++r) {
        const Enumerated e = enumerate_bounds(labels, band, 2, r);
        EXPECT_EQ(t.fpr_lower[r], e.lower) << "rank " << r;
        EXPECT_EQ(t.fpr_upper[r], e.upper) << "rank " << r;
    }
    // Hand check at r = 2: T(2) = 1/2, so one surrogate at or above rank 2
    // (only the unlabeled example at rank 1 qualifies) and one below.
    EXPECT_EQ(t.fpr_lower[2], (ContingencyTable{2, 0, 2, 4}));
}

TEST(BoundTables, MatchesEnumerationOnRandomInstances) {
    std::mt19937_64 rng(33);
    for (int it = 0; it < 400; ++it) {
        const std::size_t u = 3 + rng() % 6;
        const std::size_t kp = 2 + rng() % 3;
        const std::size_t kn = rng() % (13 - u - kp);
        const auto labels = random_labels(rng, kp, kn, u);
        const Ranking ranking = ranking_from_labels(labels);
        const std::size_t j = rng() % (u + 1);
        const double beta = static_cast<double>(j) / static_cast<double>(u);
        const CdfBand band = it % 3 == 0   ? degenerate_band(ranking)
                             : it % 3 == 1 ? bootstrap_band(ranking, 20, 0.8, rng())
                                           : random_band(rng, ranking.size());
        const BoundTables t = bound_tables(ranking, band, beta);
        expect_table_sums(t, ranking);
        for (std::size_t r = 0; r <= ranking.size(); ++r) {
            const Enumerated e = enumerate_bounds(labels, band, j, r);
            ASSERT_EQ(t.fpr_lower[r], e.lower) << "instance " << it << " rank " << r;
            ASSERT_EQ(t.fpr_upper[r], e.upper) << "instance " << it << " rank " << r;
            const OracleBounds o = brute_force_bounds(ranking, band, beta, r);
            EXPECT_EQ(o.lower_table, e.lower);
            EXPECT_EQ(o.upper_table, e.upper);
            EXPECT_EQ(o.lower_fallback, t.infeasible_lower[r]);
            EXPECT_EQ(o.upper_fallback, t.infeasible_upper[r]);
        }
    }
}

TEST(BoundTables, SumsHoldOnLargerRandomInstances) {
    std::mt19937_64 rng(34);
    for (int it = 0; it < 50; ++it) {
        const Ranking ranking = ranking_from_labels(random_labels(rng, 2 + rng() % 30, rng() % 30, rng() % 100));
        const double beta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        expect_table_sums(bound_tables(ranking, bootstrap_band(ranking, 100, 0.95, rng()), beta), ranking);
    }
}

// With a degenerate band and |P_U*| a multiple of |P_L|, both tables hit
// TPR = T(r) exactly, so raising beta is the equal-TPR larger-set move: FPR
// falls wherever the ranking beats random (FPR < TPR) and no clipping occurs.
TEST(BoundTables, RaisingBetaLowersFprWhenBetterThanRandom) {
    std::mt19937_64 rng(35);
    std::size_t checked = 0;
    for (int it = 0; it < 300; ++it) {
        const std::size_t k = 2 + rng() % 3;
        const std::size_t u = k * (3 + rng() % 4);
        const Ranking ranking = ranking_from_labels(random_labels(rng, k, rng() % 4, u));
        const CdfBand band = degenerate_band(ranking);
        const std::size_t m1 = rng() % (u / k), m2 = m1 + 1 + rng() % (u / k - m1);
        const double b1 = static_cast<double>(m1 * k) / static_cast<double>(u);
        const double b2 = static_cast<double>(m2 * k) / static_cast<double>(u);
        const BoundTables t1 = bound_tables(ranking, band, b1), t2 = bound_tables(ranking, band, b2);
        if (t2.surrogate_positives + k >= ranking.size()) continue;
        for (std::size_t r = 1; r < ranking.size(); ++r) {
            if (t1.clipped_lower[r] || t2.clipped_lower[r] || t1.clipped_upper[r] || t2.clipped_upper[r]) continue;
            const ContingencyTable& a = t1.fpr_lower[r];
            const ContingencyTable& b = t2.fpr_lower[r];
            // FPR < TPR, exactly: fp * P < tp * N
            if (!(a.fp * a.positives() < a.tp * a.negatives())) continue;
            ++checked;
            EXPECT_LE(b.fp * a.negatives(), a.fp * b.negatives());
            EXPECT_LE(t2.fpr_upper[r].fp * t1.fpr_upper[r].negatives(), t1.fpr_upper[r].fp * t2.fpr_upper[r].negatives());
        }
    }
    EXPECT_GT(checked, 100u);
}

// The bound at rank r only looks at the band at r, so the sandwich must hold
// at every rank where the band holds the latent CDF, valid elsewhere or not.
TEST(BoundTables, SandwichTrueTableWhereBandHolds) {
    std::size_t upper_checks = 0, lower_checks = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SynthDataset d = generate(unlabeled_config(1200, 0.3, 40 + 20 * seed, seed));
        const CdfBand band = bootstrap_band(d.ranking, 300, 0.95, seed);
        const BoundTables t = bound_tables(d.ranking, band, *d.truth.beta);
        ASSERT_EQ(t.surrogate_positives, d.truth.latent_positives);
        const RankCdf& latent = *d.truth.latent_cdf;
        for (std::size_t r = 0; r <= d.ranking.size(); ++r) {
            const ContingencyTable& truth = d.truth.tables[r];
            if (latent.at(r) <= band.upper(r)) {
                ++upper_checks;
                EXPECT_GE(t.fpr_lower[r].tp, truth.tp) << "rank " << r;
                EXPECT_LE(t.fpr_lower[r].fp, truth.fp);
            }
            if (latent.at(r) >= band.lower(r)) {
                ++lower_checks;
                EXPECT_LE(t.fpr_upper[r].tp, truth.tp) << "rank " << r;
                EXPECT_GE(t.fpr_upper[r].fp, truth.fp);
            }
        }
    }
    EXPECT_GT(upper_checks, 10000u);
    EXPECT_GT(lower_checks, 10000u);
}

TEST(BoundTables, BandMustCoverRanking) {
    const Ranking r = nine_ranking("BD", Label::Unlabeled);
    EXPECT_THROW(bound_tables(r, CdfBand::from_bounds({0, 1}, {0, 1}), 0.3), Error);
}

// Bound curves for a small PU-labeled score set, then a beta sweep.
#include <pueval/beta_analysis.hpp>
#include <pueval/cdf_band.hpp>
#include <pueval/curves.hpp>
#include <pueval/ranking.hpp>
#include <pueval/surrogate_tables.hpp>
#include <pueval/synth.hpp>

#include <cstdio>
#include <vector>

using namespace pueval;

int main() {
    // 300 labeled positives among 3000 examples, 20% of the unlabeled set positive.
    const SynthDataset data = generate(unlabeled_config(2700, 0.2, 300, 7));
    const Ranking& ranking = data.ranking;

    const CdfBand band = bootstrap_band(ranking, 1000, 0.95, 7);
    const BoundTables tables = bound_tables(ranking, band, 0.2);
    const BoundCurve roc = roc_bounds(tables);
    const BoundCurve pr = pr_bounds(tables);

    std::printf("examples %zu, known positives %zu, unlabeled %zu\n", ranking.size(), ranking.n_pos_labeled(),
                ranking.n_unlabeled());
    std::printf("true ROC AUC %.4f, bounds [%.4f, %.4f]\n", data.truth.auc_roc, roc.auc_lower, roc.auc_upper);
    std::printf("true PR AUC  %.4f, bounds [%.4f, %.4f]\n", data.truth.auc_pr, pr.auc_lower, pr.auc_upper);

    const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4};
    const BetaSweepResult sweep = sweep_beta(ranking, band, grid);
    std::printf("\nbeta   roc_lower  roc_upper  clipped\n");
    for (const auto& p : sweep.points)
        std::printf("%.2f   %.4f     %.4f     %zu\n", p.beta, p.roc.lower, p.roc.upper, p.clipped_ranks);
    return 0;
}

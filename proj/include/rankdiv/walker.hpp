#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rankdiv/diversity.hpp"
#include "rankdiv/rank_table.hpp"
#include "rankdiv/rng.hpp"

namespace rankdiv {

/// Scale-invariant Gaussian walk: every step each item at rank k draws an
/// auxiliary score s = k + Normal(0, k * sigma_hat); sorting the scores
/// gives the ranks of the next step.
struct WalkConfig {
    std::uint32_t n_items = 0;
    std::uint32_t n_steps = 0;
    double sigma_hat = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t burn_in = 50;  // steps discarded before the first emitted table
};

/// item_at_rank[r-1] is the item id (0-based) holding rank r; always a
/// permutation of the item set.
struct WalkState {
    std::vector<std::uint32_t> item_at_rank;
    std::uint64_t step_index = 0;

    static WalkState initial(std::uint32_t n_items);
};

/// Auxiliary scores for one step: score[r-1] = r + r * sigma_hat * z where
/// z comes from the injected source, addressed by (step, item id). Exposed
/// so the scale invariance of the update can be tested directly.
std::vector<double> step_scores(const WalkState& state, double sigma_hat,
                                const GaussianSource& noise);
std::vector<double> step_scores_serial(const WalkState& state, double sigma_hat,
                                       const GaussianSource& noise);

/// Advance one step: draw scores, re-rank by ascending score, ties keeping
/// the previous rank order (so zero noise is the identity map).
void step(WalkState& state, double sigma_hat, const GaussianSource& noise);
void step_serial(WalkState& state, double sigma_hat, const GaussianSource& noise);

/// Run the walk and emit n_steps consecutive rank tables (after burn-in)
/// over synthetic item ids "w000001", ... at slices 0..n_steps-1. Counts
/// are implicit. Bit-identical for a given config; the parallel and serial
/// paths agree exactly because draws are counter-based.
RankedCorpus simulate(const WalkConfig& config);
RankedCorpus simulate_serial(const WalkConfig& config);

/// Diversity curve rescaled to z = (log10 k - mu) / sigma, comparable
/// against the parameter-free standard cumulative Gaussian. Uses the
/// windowed bins.
std::vector<std::pair<double, double>> normalized_diversity(const DiversityCurve& curve,
                                                            const SigmoidFit& fit);

}  // namespace rankdiv

#include "rankdiv/walker.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "rankdiv/errors.hpp"

namespace rankdiv {

WalkState WalkState::initial(std::uint32_t n_items) {
    WalkState state;
    state.item_at_rank.resize(n_items);
    std::iota(state.item_at_rank.begin(), state.item_at_rank.end(), 0u);
    return state;
}

std::vector<double> step_scores_serial(const WalkState& state, double sigma_hat,
                                       const GaussianSource& noise) {
    const std::size_t n = state.item_at_rank.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rank = static_cast<double>(i + 1);
        scores[i] = rank + rank * sigma_hat *
                               noise.standard_normal(state.step_index, state.item_at_rank[i]);
    }
    return scores;
}

std::vector<double> step_scores(const WalkState& state, double sigma_hat,
                                const GaussianSource& noise) {
    const std::size_t n = state.item_at_rank.size();
    std::vector<double> scores(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const double rank = static_cast<double>(i + 1);
        scores[static_cast<std::size_t>(i)] =
            rank + rank * sigma_hat *
                       noise.standard_normal(state.step_index,
                                             state.item_at_rank[static_cast<std::size_t>(i)]);
    }
    return scores;
}

namespace {

// Re-rank by score; stable sort over the previous rank order implements the
// tie rule (previous rank ascending).
void rerank(WalkState& state, const std::vector<double>& scores) {
    const std::size_t n = state.item_at_rank.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&scores](std::uint32_t a, std::uint32_t b) {
        return scores[a] < scores[b];
    });
    std::vector<std::uint32_t> next(n);
    for (std::size_t r = 0; r < n; ++r) next[r] = state.item_at_rank[order[r]];
    state.item_at_rank = std::move(next);
    ++state.step_index;
}

void check_config(const WalkConfig& config) {
    if (config.n_items < 2) throw DomainError("walker: n_items must be >= 2");
    if (config.n_steps < 2) throw DomainError("walker: n_steps must be >= 2");
    if (!(config.sigma_hat > 0.0)) throw DomainError("walker: sigma_hat must be positive");
}

std::string item_token(std::uint32_t item, int width) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "w%0*u", width, item + 1);
    return std::string(buf);
}

template <typename ScoreFn>
RankedCorpus run_simulation(const WalkConfig& config, const ScoreFn& scores_of) {
    check_config(config);
    const CounterGaussianSource noise(config.seed);
    WalkState state = WalkState::initial(config.n_items);

    for (std::uint32_t i = 0; i < config.burn_in; ++i) {
        rerank(state, scores_of(state, config.sigma_hat, noise));
    }

    int width = 6;
    for (std::uint32_t n = config.n_items; n > 999999u; n /= 10) ++width;

    RankedCorpus corpus;
    corpus.slices.reserve(config.n_steps);
    for (std::uint32_t item = 0; item < config.n_items; ++item) {
        corpus.vocab.intern(item_token(item, width));
    }
    for (std::uint32_t t = 0; t < config.n_steps; ++t) {
        if (t > 0) rerank(state, scores_of(state, config.sigma_hat, noise));
        RankedSlice slice;
        slice.slice = static_cast<int>(t);
        slice.ids = state.item_at_rank;  // item id == token id by construction
        corpus.slices.push_back(std::move(slice));
    }
    return corpus;
}

}  // namespace

void step(WalkState& state, double sigma_hat, const GaussianSource& noise) {
    rerank(state, step_scores(state, sigma_hat, noise));
}

void step_serial(WalkState& state, double sigma_hat, const GaussianSource& noise) {
    rerank(state, step_scores_serial(state, sigma_hat, noise));
}

RankedCorpus simulate(const WalkConfig& config) {
    return run_simulation(config, [](const WalkState& s, double sh, const GaussianSource& n) {
        return step_scores(s, sh, n);
    });
}

RankedCorpus simulate_serial(const WalkConfig& config) {
    return run_simulation(config, [](const WalkState& s, double sh, const GaussianSource& n) {
        return step_scores_serial(s, sh, n);
    });
}

std::vector<std::pair<double, double>> normalized_diversity(const DiversityCurve& curve,
                                                            const SigmoidFit& fit) {
    if (!(fit.sigma > 0.0)) throw DomainError("normalized_diversity: fit sigma must be positive");
    std::vector<std::pair<double, double>> out;
    out.reserve(curve.windowed.size());
    for (const auto& bin : curve.windowed) {
        out.emplace_back((bin.center - fit.mu) / fit.sigma, bin.value);
    }
    return out;
}

}  // namespace rankdiv

#include "rankdiv/diversity.hpp"

#include <algorithm>
#include <cmath>

#include "rankdiv/errors.hpp"
#include "rankdiv/io.hpp"
#include "rankdiv/simplex.hpp"
#include "rankdiv/special.hpp"

namespace rankdiv {

SigmoidFit make_sigmoid_fit(double mu, double sigma, double mse) {
    SigmoidFit fit;
    fit.mu = mu;
    fit.sigma = sigma;
    fit.mse = mse;
    fit.k_minus = std::pow(10.0, mu - 2.0 * sigma);
    fit.k_plus = std::pow(10.0, mu + 2.0 * sigma);
    return fit;
}

namespace {

void check_diversity_inputs(std::span<const RankedSlice> slices, Rank k_max) {
    if (slices.size() < 2) {
        throw DomainError("rank_diversity: need at least 2 slices");
    }
    if (k_max == 0) throw DomainError("rank_diversity: k_max must be positive");
    for (const auto& slice : slices) {
        if (slice.size() < k_max) {
            throw DomainError("rank_diversity: k_max=" + std::to_string(k_max) +
                              " exceeds slice " + std::to_string(slice.slice) + " of size " +
                              std::to_string(slice.size()));
        }
    }
}

// Distinct tokens observed at one rank across the window.
double distinct_at_rank(std::span<const RankedSlice> slices, Rank k,
                        std::vector<TokenId>& scratch) {
    scratch.clear();
    for (const auto& slice : slices) scratch.push_back(slice.ids[k - 1]);
    std::sort(scratch.begin(), scratch.end());
    const auto unique_end = std::unique(scratch.begin(), scratch.end());
    return static_cast<double>(unique_end - scratch.begin());
}

DiversityCurve make_curve(std::span<const RankedSlice> slices, Rank k_max) {
    DiversityCurve curve;
    curve.first_slice = slices.front().slice;
    curve.last_slice = slices.back().slice;
    curve.slice_count = slices.size();
    curve.raw.resize(k_max);
    return curve;
}

}  // namespace

DiversityCurve rank_diversity_serial(std::span<const RankedSlice> slices, Rank k_max) {
    check_diversity_inputs(slices, k_max);
    DiversityCurve curve = make_curve(slices, k_max);
    const double t = static_cast<double>(curve.slice_count);
    std::vector<TokenId> scratch;
    scratch.reserve(curve.slice_count);
    for (Rank k = 1; k <= k_max; ++k) {
        curve.raw[k - 1] = distinct_at_rank(slices, k, scratch) / t;
    }
    return curve;
}

DiversityCurve rank_diversity_serial(const RankedCorpus& corpus, Rank k_max) {
    return rank_diversity_serial(std::span<const RankedSlice>(corpus.slices), k_max);
}

DiversityCurve rank_diversity(std::span<const RankedSlice> slices, Rank k_max) {
    check_diversity_inputs(slices, k_max);
    DiversityCurve curve = make_curve(slices, k_max);
    const double t = static_cast<double>(curve.slice_count);

#pragma omp parallel
    {
        std::vector<TokenId> scratch;
        scratch.reserve(curve.slice_count);
#pragma omp for schedule(static)
        for (std::int64_t k = 1; k <= static_cast<std::int64_t>(k_max); ++k) {
            curve.raw[k - 1] = distinct_at_rank(slices, static_cast<Rank>(k), scratch) / t;
        }
    }
    return curve;
}

DiversityCurve rank_diversity(const RankedCorpus& corpus, Rank k_max) {
    return rank_diversity(std::span<const RankedSlice>(corpus.slices), k_max);
}

DiversityCurve log_window(const DiversityCurve& curve, double delta) {
    if (curve.raw.empty()) throw DomainError("log_window: raw curve is empty");
    if (!(delta > 0.0)) throw DomainError("log_window: delta must be positive");

    DiversityCurve windowed = curve;
    windowed.windowed.clear();
    std::int64_t current_bin = -1;
    double sum = 0.0;
    std::size_t n = 0;
    auto flush = [&] {
        if (n > 0) {
            windowed.windowed.push_back(
                {(static_cast<double>(current_bin) + 0.5) * delta, sum / static_cast<double>(n)});
        }
        sum = 0.0;
        n = 0;
    };
    // log10 k is non-decreasing in k, so bins fill in order.
    for (Rank k = 1; k <= curve.k_max(); ++k) {
        const auto bin = static_cast<std::int64_t>(std::floor(std::log10(static_cast<double>(k)) / delta));
        if (bin != current_bin) {
            flush();
            current_bin = bin;
        }
        sum += curve.d(k);
        ++n;
    }
    flush();
    return windowed;
}

SigmoidFit fit_sigmoid(const DiversityCurve& curve) {
    const auto& bins = curve.windowed;
    if (bins.size() < 3) {
        throw DomainError("fit_sigmoid: need at least 3 windowed bins, have " +
                          std::to_string(bins.size()));
    }

    const auto objective = [&bins](std::span<const double> p) {
        const double mu = p[0];
        const double sigma = std::exp(p[1]);
        double sse = 0.0;
        for (const auto& bin : bins) {
            const double diff = normal_cdf(bin.center, mu, sigma) - bin.value;
            sse += diff * diff;
        }
        return sse / static_cast<double>(bins.size());
    };

    // Start mu at the first bin whose mean diversity crosses 1/2; fall back
    // to the midpoint of the log-range when the curve never gets there.
    double mu0 = 0.5 * (bins.front().center + bins.back().center);
    for (const auto& bin : bins) {
        if (bin.value >= 0.5) {
            mu0 = bin.center;
            break;
        }
    }
    const double start[] = {mu0, std::log(0.5)};
    const double steps[] = {0.5, 0.5};
    const SimplexResult result = minimize_simplex(objective, start, steps);
    return make_sigmoid_fit(result.x[0], std::exp(result.x[1]), result.value);
}

RankRegime classify_rank(Rank k, const SigmoidFit& fit) {
    const double rank = static_cast<double>(k);
    if (rank <= fit.k_minus) return RankRegime::Head;
    if (rank <= fit.k_plus) return RankRegime::Body;
    return RankRegime::Tail;
}

const char* to_string(RankRegime regime) {
    switch (regime) {
        case RankRegime::Head: return "head";
        case RankRegime::Body: return "body";
        case RankRegime::Tail: return "tail";
    }
    return "?";
}

std::vector<EpochFit> diversity_over_epochs(const RankedCorpus& corpus,
                                            std::size_t epoch_length, Rank k_max,
                                            double delta) {
    if (epoch_length < 2) throw DomainError("diversity_over_epochs: epoch length must be >= 2");
    const std::size_t n_epochs = corpus.slice_count() / epoch_length;
    std::vector<EpochFit> fits(n_epochs);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(n_epochs); ++e) {
        const std::size_t begin = static_cast<std::size_t>(e) * epoch_length;
        const std::span<const RankedSlice> window(corpus.slices.data() + begin, epoch_length);
        EpochFit& epoch = fits[static_cast<std::size_t>(e)];
        epoch.first_slice = window.front().slice;
        epoch.last_slice = window.back().slice;
        try {
            const DiversityCurve curve = log_window(rank_diversity_serial(window, k_max), delta);
            epoch.fit = fit_sigmoid(curve);
        } catch (const std::exception& ex) {
            epoch.error = ex.what();
        }
    }
    return fits;
}

std::string raw_curve_csv(const DiversityCurve& curve) {
    std::string out = "k,d_raw\n";
    for (Rank k = 1; k <= curve.k_max(); ++k) {
        out.append(std::to_string(k));
        out.push_back(',');
        out.append(format_number(curve.d(k)));
        out.push_back('\n');
    }
    return out;
}

std::string windowed_curve_csv(const DiversityCurve& curve, const SigmoidFit& fit) {
    std::string out = "bin_center,d_windowed,phi_fit\n";
    for (const auto& bin : curve.windowed) {
        out.append(format_number(bin.center));
        out.push_back(',');
        out.append(format_number(bin.value));
        out.push_back(',');
        out.append(format_number(normal_cdf(bin.center, fit.mu, fit.sigma)));
        out.push_back('\n');
    }
    return out;
}

}  // namespace rankdiv

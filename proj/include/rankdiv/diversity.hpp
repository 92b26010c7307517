#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankdiv/rank_table.hpp"

namespace rankdiv {

/// Rank diversity d(k) over a window of T slices: the number of distinct
/// tokens seen at rank k, divided by T. Raw values live on the grid
/// 1/T, 2/T, ..., 1.
struct DiversityCurve {
    int first_slice = 0;
    int last_slice = 0;
    std::size_t slice_count = 0;          // T
    std::vector<double> raw;              // raw[k-1] = d(k), k = 1..k_max

    struct Bin {
        double center = 0.0;  // log10-rank units
        double value = 0.0;   // mean of raw d(k) over ranks in the bin
    };
    std::vector<Bin> windowed;

    double d(Rank k) const { return raw[k - 1]; }
    Rank k_max() const { return static_cast<Rank>(raw.size()); }
};

/// Cumulative-Gaussian fit of a diversity curve, with the regime borders
/// at log10 k = mu -+ 2 sigma.
struct SigmoidFit {
    double mu = 0.0;
    double sigma = 0.0;
    double mse = 0.0;
    double k_minus = 0.0;  // 10^(mu - 2 sigma)
    double k_plus = 0.0;   // 10^(mu + 2 sigma)
};

SigmoidFit make_sigmoid_fit(double mu, double sigma, double mse);

/// Compute raw d(k) for k = 1..k_max. Needs >= 2 slices and k_max within
/// every slice; the error names the first offending slice.
DiversityCurve rank_diversity(const RankedCorpus& corpus, Rank k_max);
DiversityCurve rank_diversity(std::span<const RankedSlice> slices, Rank k_max);

/// Single-threaded reference with identical output.
DiversityCurve rank_diversity_serial(const RankedCorpus& corpus, Rank k_max);
DiversityCurve rank_diversity_serial(std::span<const RankedSlice> slices, Rank k_max);

/// Average raw d(k) in bins of width delta in log10 k (bin i covers
/// [i*delta, (i+1)*delta)). Empty bins are omitted. Returns a copy of the
/// curve with `windowed` filled.
DiversityCurve log_window(const DiversityCurve& curve, double delta = 0.1);

/// Least-squares fit of the cumulative Gaussian to the windowed curve.
/// Simplex descent on (mu, log sigma); needs >= 3 bins.
SigmoidFit fit_sigmoid(const DiversityCurve& curve);

enum class RankRegime { Head, Body, Tail };

/// Head: k <= k-; Body: k- < k <= k+; Tail: beyond k+. When mu - 2 sigma
/// is negative, k- < 1 and the head is empty.
RankRegime classify_rank(Rank k, const SigmoidFit& fit);

const char* to_string(RankRegime regime);

/// Sigmoid fit over each consecutive window of `epoch_length` slices.
/// Per-epoch fit failures are reported in place, not propagated.
struct EpochFit {
    int first_slice = 0;
    int last_slice = 0;
    std::optional<SigmoidFit> fit;
    std::string error;  // set when fit is empty
};

std::vector<EpochFit> diversity_over_epochs(const RankedCorpus& corpus,
                                            std::size_t epoch_length, Rank k_max,
                                            double delta = 0.1);

/// CSV exports: `k,d_raw` and `bin_center,d_windowed,phi_fit`.
std::string raw_curve_csv(const DiversityCurve& curve);
std::string windowed_curve_csv(const DiversityCurve& curve, const SigmoidFit& fit);

}  // namespace rankdiv

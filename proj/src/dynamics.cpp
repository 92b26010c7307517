#include "rankdiv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rankdiv/errors.hpp"
#include "rankdiv/rng.hpp"
#include "rankdiv/simplex.hpp"

namespace rankdiv {

FlightSeries flights(const RankTrajectory& traj) {
    FlightSeries series;
    series.token = traj.token;
    if (traj.points.size() < 2) return series;
    series.flights.reserve(traj.points.size() - 1);
    for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
        const auto& [slice_a, rank_a] = traj.points[i];
        const auto& [slice_b, rank_b] = traj.points[i + 1];
        if (slice_b != slice_a + 1) continue;  // gap: no flight
        series.flights.push_back((static_cast<double>(rank_b) - static_cast<double>(rank_a)) /
                                 static_cast<double>(rank_a));
    }
    return series;
}

NormalizedFlightSeries normalize_flights(const FlightSeries& series) {
    const auto& x = series.flights;
    if (x.empty()) throw DomainError("normalize_flights: empty flight series");

    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (const double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (const double v : x) var += (v - mean) * (v - mean);
    var /= n;
    if (var == 0.0) {
        throw DomainError("normalize_flights: zero variance for token '" + series.token + "'");
    }

    NormalizedFlightSeries out;
    out.token = series.token;
    out.mean = mean;
    out.stddev = std::sqrt(var);
    out.values.reserve(x.size());
    for (const double v : x) out.values.push_back((v - mean) / out.stddev);
    return out;
}

std::vector<std::vector<Rank>> build_rank_index(const RankedCorpus& corpus) {
    std::vector<std::vector<Rank>> index(corpus.slice_count());
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(corpus.slice_count()); ++s) {
        auto& ranks = index[static_cast<std::size_t>(s)];
        ranks.assign(corpus.vocab.size(), 0);
        const auto& ids = corpus.slices[static_cast<std::size_t>(s)].ids;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ranks[ids[i]] = static_cast<Rank>(i + 1);
        }
    }
    return index;
}

namespace {

using SparseHistogram = std::map<std::int64_t, std::size_t>;

void check_band(const RankedCorpus& corpus, Rank band_lo, Rank band_hi) {
    if (band_lo == 0 || band_lo > band_hi) {
        throw DomainError("flight_histogram: invalid rank band");
    }
    for (const auto& slice : corpus.slices) {
        if (slice.size() < band_hi) {
            throw DomainError("flight_histogram: band exceeds slice " +
                              std::to_string(slice.slice) + " of size " +
                              std::to_string(slice.size()));
        }
    }
}

// Flights starting in the band between one adjacent slice pair.
void accumulate_pair(const RankedSlice& from, const std::vector<Rank>& to_rank_of,
                     Rank band_lo, Rank band_hi, double bin_width, SparseHistogram& bins,
                     std::size_t& total) {
    for (Rank k = band_lo; k <= band_hi; ++k) {
        const TokenId id = from.ids[k - 1];
        const Rank next = to_rank_of[id];
        if (next == 0) continue;
        const double flight =
            (static_cast<double>(next) - static_cast<double>(k)) / static_cast<double>(k);
        const auto bin = static_cast<std::int64_t>(std::llround(flight / bin_width));
        ++bins[bin];
        ++total;
    }
}

FlightHistogram finish_histogram(Rank band_lo, Rank band_hi, double bin_width,
                                 const SparseHistogram& bins, std::size_t total) {
    if (total == 0) {
        throw DomainError("flight_histogram: no flights start in band [" +
                          std::to_string(band_lo) + ", " + std::to_string(band_hi) + "]");
    }
    FlightHistogram hist;
    hist.band_lo = band_lo;
    hist.band_hi = band_hi;
    hist.bin_width = bin_width;
    hist.sample_count = total;
    hist.bins.reserve(bins.size());
    const double norm = static_cast<double>(total) * bin_width;
    for (const auto& [bin, count] : bins) {
        hist.bins.push_back({static_cast<double>(bin) * bin_width,
                             static_cast<double>(count) / norm});
    }
    return hist;
}

}  // namespace

FlightHistogram flight_histogram_serial(const RankedCorpus& corpus, Rank band_lo,
                                        Rank band_hi, double bin_width) {
    check_band(corpus, band_lo, band_hi);
    if (!(bin_width > 0.0)) throw DomainError("flight_histogram: bin width must be positive");

    SparseHistogram bins;
    std::size_t total = 0;
    std::vector<Rank> rank_of(corpus.vocab.size(), 0);
    for (std::size_t s = 0; s + 1 < corpus.slice_count(); ++s) {
        const auto& from = corpus.slices[s];
        const auto& to = corpus.slices[s + 1];
        if (to.slice != from.slice + 1) continue;
        std::fill(rank_of.begin(), rank_of.end(), 0);
        for (std::size_t i = 0; i < to.ids.size(); ++i) rank_of[to.ids[i]] = static_cast<Rank>(i + 1);
        accumulate_pair(from, rank_of, band_lo, band_hi, bin_width, bins, total);
    }
    return finish_histogram(band_lo, band_hi, bin_width, bins, total);
}

FlightHistogram flight_histogram(const RankedCorpus& corpus, Rank band_lo, Rank band_hi,
                                 double bin_width) {
    check_band(corpus, band_lo, band_hi);
    if (!(bin_width > 0.0)) throw DomainError("flight_histogram: bin width must be positive");

    const std::int64_t pairs = static_cast<std::int64_t>(corpus.slice_count()) - 1;
    SparseHistogram bins;
    std::size_t total = 0;

#pragma omp parallel
    {
        SparseHistogram local_bins;
        std::size_t local_total = 0;
        std::vector<Rank> rank_of(corpus.vocab.size(), 0);
#pragma omp for schedule(dynamic)
        for (std::int64_t s = 0; s < pairs; ++s) {
            const auto& from = corpus.slices[static_cast<std::size_t>(s)];
            const auto& to = corpus.slices[static_cast<std::size_t>(s) + 1];
            if (to.slice != from.slice + 1) continue;
            std::fill(rank_of.begin(), rank_of.end(), 0);
            for (std::size_t i = 0; i < to.ids.size(); ++i) {
                rank_of[to.ids[i]] = static_cast<Rank>(i + 1);
            }
            accumulate_pair(from, rank_of, band_lo, band_hi, bin_width, local_bins, local_total);
        }
#pragma omp critical
        {
            for (const auto& [bin, count] : local_bins) bins[bin] += count;
            total += local_total;
        }
    }
    return finish_histogram(band_lo, band_hi, bin_width, bins, total);
}

const char* to_string(DistributionFamily family) {
    return family == DistributionFamily::Gaussian ? "gaussian" : "lorentzian";
}

double density(const DistributionFit& fit, double x) {
    const double d = x - fit.location;
    if (fit.family == DistributionFamily::Gaussian) {
        return std::exp(-d * d / (2.0 * fit.scale * fit.scale)) /
               (fit.scale * std::sqrt(2.0 * std::numbers::pi));
    }
    return fit.scale / (std::numbers::pi * (d * d + fit.scale * fit.scale));
}

DistributionFit fit_flight_distribution(const FlightHistogram& hist,
                                        DistributionFamily family) {
    if (hist.bins.size() < 5) {
        throw DomainError("fit_flight_distribution: need >= 5 non-empty bins, have " +
                          std::to_string(hist.bins.size()));
    }

    // Moment estimates seed the descent; for the Lorentzian the half width
    // at half maximum is the better scale guess.
    double mass = 0.0, mean = 0.0;
    for (const auto& bin : hist.bins) {
        mass += bin.density;
        mean += bin.center * bin.density;
    }
    mean /= mass;
    double var = 0.0;
    for (const auto& bin : hist.bins) {
        var += (bin.center - mean) * (bin.center - mean) * bin.density;
    }
    var /= mass;
    double scale0 = std::sqrt(std::max(var, 1e-12));
    if (family == DistributionFamily::Lorentzian) {
        const auto peak = std::max_element(
            hist.bins.begin(), hist.bins.end(),
            [](const auto& a, const auto& b) { return a.density < b.density; });
        double hwhm = scale0;
        for (auto it = peak; it != hist.bins.end(); ++it) {
            if (it->density <= 0.5 * peak->density) {
                hwhm = it->center - peak->center;
                break;
            }
        }
        scale0 = std::max(hwhm, hist.bin_width * 0.5);
    }

    const auto objective = [&hist, family](std::span<const double> p) {
        DistributionFit trial{family, p[0], std::exp(p[1]), 0.0};
        double sse = 0.0;
        for (const auto& bin : hist.bins) {
            const double diff = density(trial, bin.center) - bin.density;
            sse += diff * diff;
        }
        return sse;
    };

    const double start[] = {mean, std::log(scale0)};
    const double steps[] = {std::max(scale0 * 0.5, hist.bin_width), 0.5};
    const SimplexResult result = minimize_simplex(objective, start, steps);

    DistributionFit fit;
    fit.family = family;
    fit.location = result.x[0];
    fit.scale = std::exp(result.x[1]);
    fit.sse = result.value;
    return fit;
}

namespace {

// Per-token flight count / mean / M2 over the rank index, plus the rank at
// the token's first present slice. Welford accumulation.
struct TokenFlightStats {
    std::uint32_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    Rank initial_rank = 0;
};

void token_stats_range(const RankedCorpus& corpus,
                       const std::vector<std::vector<Rank>>& rank_of, TokenId begin,
                       TokenId end, std::vector<TokenFlightStats>& stats) {
    const std::size_t t = corpus.slice_count();
    for (TokenId id = begin; id < end; ++id) {
        auto& st = stats[id];
        for (std::size_t s = 0; s < t; ++s) {
            const Rank rank = rank_of[s][id];
            if (rank == 0) continue;
            if (st.initial_rank == 0) st.initial_rank = rank;
            if (s + 1 >= t) break;
            if (corpus.slices[s + 1].slice != corpus.slices[s].slice + 1) continue;
            const Rank next = rank_of[s + 1][id];
            if (next == 0) continue;
            const double flight = (static_cast<double>(next) - static_cast<double>(rank)) /
                                  static_cast<double>(rank);
            ++st.count;
            const double delta = flight - st.mean;
            st.mean += delta / st.count;
            st.m2 += delta * (flight - st.mean);
        }
    }
}

SigmaHatResult sigma_from_stats(const std::vector<TokenFlightStats>& stats, Rank k_max) {
    constexpr double kBinWidth = 0.005;
    std::map<std::int64_t, std::size_t> histogram;
    SigmaHatResult result;
    bool any_nonzero = false;
    for (const auto& st : stats) {
        if (st.count < 2 || st.initial_rank == 0 || st.initial_rank > k_max) continue;
        const double sigma = std::sqrt(st.m2 / (st.count - 1));  // sample stddev
        if (sigma > 0.0) any_nonzero = true;
        ++histogram[static_cast<std::int64_t>(std::floor(sigma / kBinWidth))];
        ++result.token_count;
    }
    if (result.token_count == 0) {
        throw DomainError("sigma_hat: no token has >= 2 flights within k_max");
    }
    if (!any_nonzero) {
        result.value = 0.0;
        result.degenerate = true;
        return result;
    }
    std::int64_t best_bin = 0;
    std::size_t best_count = 0;
    for (const auto& [bin, count] : histogram) {  // ascending bins: ties keep the lower
        if (count > best_count) {
            best_count = count;
            best_bin = bin;
        }
    }
    result.value = (static_cast<double>(best_bin) + 0.5) * kBinWidth;
    return result;
}

}  // namespace

SigmaHatResult sigma_hat_serial(const RankedCorpus& corpus, Rank k_max) {
    if (corpus.slice_count() < 3) throw DomainError("sigma_hat: need at least 3 slices");
    const auto rank_of = build_rank_index(corpus);
    std::vector<TokenFlightStats> stats(corpus.vocab.size());
    token_stats_range(corpus, rank_of, 0, static_cast<TokenId>(corpus.vocab.size()), stats);
    return sigma_from_stats(stats, k_max);
}

SigmaHatResult sigma_hat(const RankedCorpus& corpus, Rank k_max) {
    if (corpus.slice_count() < 3) throw DomainError("sigma_hat: need at least 3 slices");
    const auto rank_of = build_rank_index(corpus);
    std::vector<TokenFlightStats> stats(corpus.vocab.size());
    const auto n = static_cast<std::int64_t>(corpus.vocab.size());

#pragma omp parallel for schedule(static)
    for (std::int64_t chunk = 0; chunk < n; chunk += 4096) {
        token_stats_range(corpus, rank_of, static_cast<TokenId>(chunk),
                          static_cast<TokenId>(std::min<std::int64_t>(chunk + 4096, n)), stats);
    }
    return sigma_from_stats(stats, k_max);
}

std::vector<double> autocorrelation(const NormalizedFlightSeries& series,
                                    std::size_t tau_max) {
    const auto& d = series.values;
    if (d.size() <= tau_max) {
        throw DomainError("autocorrelation: series length " + std::to_string(d.size()) +
                          " must exceed tau_max " + std::to_string(tau_max));
    }
    std::vector<double> c(tau_max + 1);
    c[0] = 1.0;  // <d^2> = 1 by construction of the normalized series
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        double sum = 0.0;
        const std::size_t terms = d.size() - tau;
        for (std::size_t i = 0; i < terms; ++i) sum += d[i] * d[i + tau];
        c[tau] = std::clamp(sum / static_cast<double>(terms), -1.0, 1.0);
    }
    return c;
}

namespace {

// Flights of the token holding `rank` in the first slice, empty unless the
// token is present in every slice with full adjacency.
std::vector<double> full_flight_series(const RankedCorpus& corpus,
                                       const std::vector<std::vector<Rank>>& rank_of,
                                       Rank first_slice_rank) {
    const std::size_t t = corpus.slice_count();
    const TokenId id = corpus.slices.front().ids[first_slice_rank - 1];
    std::vector<double> fl;
    fl.reserve(t - 1);
    for (std::size_t s = 0; s + 1 < t; ++s) {
        if (corpus.slices[s + 1].slice != corpus.slices[s].slice + 1) return {};
        const Rank a = rank_of[s][id];
        const Rank b = rank_of[s + 1][id];
        if (a == 0 || b == 0) return {};
        fl.push_back((static_cast<double>(b) - static_cast<double>(a)) /
                     static_cast<double>(a));
    }
    return fl;
}

bool is_frozen(const std::vector<double>& fl) {
    return std::all_of(fl.begin(), fl.end(), [&fl](double v) { return v == fl.front(); });
}

}  // namespace

std::vector<double> averaged_correlation(const RankedCorpus& corpus,
                                         std::size_t sample_size, std::size_t tau_max,
                                         std::uint64_t seed) {
    if (corpus.slice_count() < 2) throw DomainError("averaged_correlation: need >= 2 slices");
    if (sample_size == 0) throw DomainError("averaged_correlation: sample size must be positive");
    if (corpus.slice_count() - 1 <= tau_max) {
        throw DomainError("averaged_correlation: tau_max " + std::to_string(tau_max) +
                          " needs more than " + std::to_string(tau_max + 1) + " flights per token");
    }

    const auto rank_of = build_rank_index(corpus);
    const auto& first = corpus.slices.front();

    // A rank is eligible when its first-slice token is present in every
    // slice with full adjacency and its flight series is not frozen.
    std::vector<char> ok(first.size(), 0);
#pragma omp parallel for schedule(dynamic, 512)
    for (std::int64_t r = 1; r <= static_cast<std::int64_t>(first.size()); ++r) {
        const auto fl = full_flight_series(corpus, rank_of, static_cast<Rank>(r));
        if (!fl.empty() && !is_frozen(fl)) ok[static_cast<std::size_t>(r - 1)] = 1;
    }
    std::vector<Rank> eligible;
    for (std::size_t r = 0; r < ok.size(); ++r) {
        if (ok[r]) eligible.push_back(static_cast<Rank>(r + 1));
    }

    if (eligible.size() < sample_size) {
        throw DomainError("averaged_correlation: only " + std::to_string(eligible.size()) +
                          " eligible ranks, need " + std::to_string(sample_size));
    }

    const auto picks = sample_without_replacement(eligible.size(), sample_size, seed);
    std::vector<double> mean_c(tau_max + 1, 0.0);
    for (const std::size_t pick : picks) {
        const Rank rank = eligible[pick];
        FlightSeries fs;
        fs.token = corpus.vocab.token(first.ids[rank - 1]);
        fs.flights = full_flight_series(corpus, rank_of, rank);
        const auto c = autocorrelation(normalize_flights(fs), tau_max);
        for (std::size_t tau = 0; tau <= tau_max; ++tau) mean_c[tau] += c[tau];
    }
    for (double& v : mean_c) v /= static_cast<double>(sample_size);
    return mean_c;
}

}  // namespace rankdiv

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankdiv/rank_table.hpp"

namespace rankdiv {

/// Relative rank changes (k_{t+1} - k_t) / k_t of one token between
/// numerically adjacent slices where the token is present in both. Gaps
/// produce no flight.
struct FlightSeries {
    std::string token;
    std::vector<double> flights;
};

FlightSeries flights(const RankTrajectory& traj);

/// Flights shifted and scaled so the time averages <d> = 0 and <d^2> = 1
/// hold exactly (population normalization; this is what makes the lag-0
/// autocorrelation equal 1). The originals are recoverable through
/// `mean` and `stddev`.
struct NormalizedFlightSeries {
    std::string token;
    std::vector<double> values;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Throws DomainError when the series is empty or has zero variance.
NormalizedFlightSeries normalize_flights(const FlightSeries& series);

/// Density histogram of flights whose starting rank lies in [band_lo,
/// band_hi]. Bin centers sit on multiples of the bin width; density
/// integrates to 1.
struct FlightHistogram {
    Rank band_lo = 0;
    Rank band_hi = 0;
    double bin_width = 0.0;
    std::size_t sample_count = 0;

    struct Bin {
        double center = 0.0;
        double density = 0.0;
    };
    std::vector<Bin> bins;  // ascending center, empty bins omitted
};

FlightHistogram flight_histogram(const RankedCorpus& corpus, Rank band_lo, Rank band_hi,
                                 double bin_width);
FlightHistogram flight_histogram_serial(const RankedCorpus& corpus, Rank band_lo,
                                        Rank band_hi, double bin_width);

enum class DistributionFamily { Gaussian, Lorentzian };

const char* to_string(DistributionFamily family);

/// Least-squares curve fit of a density family to histogram bins.
/// Gaussian: exp(-(x-m)^2 / 2s^2) / (s sqrt(2 pi)); Lorentzian:
/// (1/pi) g / ((x-m)^2 + g^2). `scale` is s or g respectively.
struct DistributionFit {
    DistributionFamily family = DistributionFamily::Gaussian;
    double location = 0.0;
    double scale = 0.0;
    double sse = 0.0;
};

DistributionFit fit_flight_distribution(const FlightHistogram& hist,
                                        DistributionFamily family);

double density(const DistributionFit& fit, double x);

/// The most common per-token standard deviation of flights: per-token
/// sample standard deviations (n-1 denominator) of tokens with >= 2 flights
/// and initial rank <= k_max, reduced to the mode over a fixed 0.005-wide
/// histogram (ties resolve to the lower bin).
struct SigmaHatResult {
    double value = 0.0;
    std::size_t token_count = 0;  // tokens that entered the histogram
    bool degenerate = false;      // every eligible token was frozen in rank
};

SigmaHatResult sigma_hat(const RankedCorpus& corpus, Rank k_max);
SigmaHatResult sigma_hat_serial(const RankedCorpus& corpus, Rank k_max);

/// Time autocorrelation C_tau = <d_t d_{t+tau}> for tau = 0..tau_max.
/// C_0 = 1 by construction; values are clamped into [-1, 1] so the
/// Cauchy-Schwarz bound survives finite-sample noise.
std::vector<double> autocorrelation(const NormalizedFlightSeries& series,
                                    std::size_t tau_max);

/// Mean C_tau over `sample_size` ranks drawn uniformly without replacement
/// (seeded) from the first slice. Eligible ranks hold tokens present in
/// every slice with non-degenerate flights. Throws DomainError naming the
/// eligible count when there are too few.
std::vector<double> averaged_correlation(const RankedCorpus& corpus,
                                         std::size_t sample_size, std::size_t tau_max,
                                         std::uint64_t seed);

/// Per-slice token-id -> rank lookup (0 = absent). Shared by the flight
/// kernels; exposed for reuse and benchmarks.
std::vector<std::vector<Rank>> build_rank_index(const RankedCorpus& corpus);

}  // namespace rankdiv

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankdiv/rank_table.hpp"

namespace rankdiv {

/// The five rank-frequency families, all sharing the 1/k^a factor.
/// Wire ids m1..m5 (see model_id):
///   m1  pure power law
///   m2  power law with exponential cutoff exp(-b(k-1))
///   m3  power law with finite-size factor (N+1-k)^alpha
///   m4  both corrections combined
///   m5  double Zipf: exponent 1 up to the crossover rank k_c, a beyond it
enum class ZipfModel { PureZipf, ExpCutoff, FiniteSize, FiniteSizeExpCutoff, DoubleZipf };

const char* model_id(ZipfModel model);
ZipfModel model_from_id(const std::string& id);
std::size_t free_parameter_count(ZipfModel model);

struct ZipfModelSpec {
    ZipfModel family = ZipfModel::PureZipf;
    double a = 1.0;          // power-law exponent, > 0
    double b = 0.0;          // exponential decay rate (m2/m4), >= 0
    double alpha = 0.0;      // finite-size exponent (m3/m4), >= 0
    std::uint32_t k_c = 1;   // crossover rank (m5), in [1, n_bar]
    std::uint32_t n_bar = 0; // vocabulary size
};

/// Unnormalized model value at rank k.
double unnormalized(const ZipfModelSpec& spec, std::uint32_t k);

/// Normalization constant 1 / sum_{k=1..n_bar} unnormalized(k) by direct
/// summation. Throws DomainError on invalid parameters or a divergent /
/// zero sum.
double normalize(const ZipfModelSpec& spec);
double normalize_serial(const ZipfModelSpec& spec);

/// A spec with its normalization computed; evaluate() sums to 1 over
/// 1..n_bar within 1e-9.
struct NormalizedZipfModel {
    ZipfModelSpec spec;
    double normalization = 0.0;

    double evaluate(std::uint32_t k) const;
};

NormalizedZipfModel normalized_model(const ZipfModelSpec& spec);

/// chi-square p-value through the regularized incomplete gamma function:
/// p = Q(dof/2, chi2/2). `underflow` is set when p rounds to zero in
/// double precision; report such values as "< 2.3e-308".
struct PValue {
    double p = 1.0;
    bool underflow = false;
};

PValue chi2_pvalue(double chi2, std::size_t dof);

struct ZipfFitOptions {
    std::uint32_t k_min = 1;
    std::uint32_t k_max = 0;  // 0: the full table
};

struct ZipfModelFit {
    NormalizedZipfModel model;
    double chi2 = 0.0;
    std::size_t dof = 0;
    PValue p_value;
    std::string statistic;  // "pearson" (count-scaled) or "frequency"
};

/// Fit one family to an observed rank table by chi-square minimization over
/// [k_min, k_max]: simplex descent from 8 deterministic multi-starts for the
/// continuous parameters; m5 scans k_c on a log-spaced grid and refines the
/// best grid point locally. Bounds: a in (0,4], b in [0,1], alpha in [0,10],
/// k_c in [1, n_bar].
ZipfModelFit fit_zipf_model(ZipfModel family, const RankedSlice& observed,
                            const ZipfFitOptions& options = {});

/// chi-square of a fully specified model against the observed table, same
/// convention as fit_zipf_model (exposed for the dual-route checks).
double zipf_chi2(const NormalizedZipfModel& model, const RankedSlice& observed,
                 const ZipfFitOptions& options = {});

/// Pointwise log10(observed / model) over the fit range. Ranks where the
/// model evaluates to zero are skipped and counted in `excluded`.
std::vector<std::pair<std::uint32_t, double>> model_ratio_curve(
    const ZipfModelFit& fit, const RankedSlice& observed,
    const ZipfFitOptions& options = {}, std::size_t* excluded = nullptr);

}  // namespace rankdiv

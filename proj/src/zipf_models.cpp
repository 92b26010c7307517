#include "rankdiv/zipf_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rankdiv/errors.hpp"
#include "rankdiv/simplex.hpp"
#include "rankdiv/special.hpp"

namespace rankdiv {

const char* model_id(ZipfModel model) {
    switch (model) {
        case ZipfModel::PureZipf: return "m1";
        case ZipfModel::ExpCutoff: return "m2";
        case ZipfModel::FiniteSize: return "m3";
        case ZipfModel::FiniteSizeExpCutoff: return "m4";
        case ZipfModel::DoubleZipf: return "m5";
    }
    return "?";
}

ZipfModel model_from_id(const std::string& id) {
    if (id == "m1") return ZipfModel::PureZipf;
    if (id == "m2") return ZipfModel::ExpCutoff;
    if (id == "m3") return ZipfModel::FiniteSize;
    if (id == "m4") return ZipfModel::FiniteSizeExpCutoff;
    if (id == "m5") return ZipfModel::DoubleZipf;
    throw DomainError("unknown model id '" + id + "' (expected m1..m5)");
}

std::size_t free_parameter_count(ZipfModel model) {
    switch (model) {
        case ZipfModel::PureZipf: return 1;           // a
        case ZipfModel::ExpCutoff: return 2;          // a, b
        case ZipfModel::FiniteSize: return 2;         // a, alpha
        case ZipfModel::FiniteSizeExpCutoff: return 3;
        case ZipfModel::DoubleZipf: return 2;         // a, k_c
    }
    return 0;
}

namespace {

void check_spec(const ZipfModelSpec& spec) {
    if (spec.n_bar == 0) throw DomainError("zipf model: n_bar must be positive");
    if (!(spec.a > 0.0)) throw DomainError("zipf model: exponent a must be positive");
    if (spec.b < 0.0) throw DomainError("zipf model: decay rate b must be non-negative");
    if (spec.alpha < 0.0) throw DomainError("zipf model: alpha must be non-negative");
    if (spec.family == ZipfModel::DoubleZipf && (spec.k_c < 1 || spec.k_c > spec.n_bar)) {
        throw DomainError("zipf model: k_c must lie in [1, n_bar]");
    }
}

}  // namespace

double unnormalized(const ZipfModelSpec& spec, std::uint32_t k) {
    if (k < 1 || k > spec.n_bar) {
        throw DomainError("zipf model: rank " + std::to_string(k) + " outside [1, " +
                          std::to_string(spec.n_bar) + "]");
    }
    const double kd = static_cast<double>(k);
    switch (spec.family) {
        case ZipfModel::PureZipf:
            return std::pow(kd, -spec.a);
        case ZipfModel::ExpCutoff:
            return std::exp(-spec.b * (kd - 1.0)) * std::pow(kd, -spec.a);
        case ZipfModel::FiniteSize:
            return std::pow(static_cast<double>(spec.n_bar) + 1.0 - kd, spec.alpha) *
                   std::pow(kd, -spec.a);
        case ZipfModel::FiniteSizeExpCutoff:
            return std::pow(static_cast<double>(spec.n_bar) + 1.0 - kd, spec.alpha) *
                   std::exp(-spec.b * (kd - 1.0)) * std::pow(kd, -spec.a);
        case ZipfModel::DoubleZipf:
            if (k <= spec.k_c) return 1.0 / kd;
            return std::pow(static_cast<double>(spec.k_c), spec.a - 1.0) *
                   std::pow(kd, -spec.a);
    }
    return 0.0;
}

namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double value) {
        const double y = value - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double finish_normalization(double sum) {
    if (!std::isfinite(sum) || sum <= 0.0) {
        throw DomainError("zipf model: normalization sum is divergent or zero");
    }
    return 1.0 / sum;
}

}  // namespace

double normalize_serial(const ZipfModelSpec& spec) {
    check_spec(spec);
    KahanSum sum;
    for (std::uint32_t k = 1; k <= spec.n_bar; ++k) sum.add(unnormalized(spec, k));
    return finish_normalization(sum.sum);
}

double normalize(const ZipfModelSpec& spec) {
    check_spec(spec);
    // Fixed-size chunks summed independently and merged in chunk order, so
    // the result does not depend on the thread count or schedule.
    constexpr std::uint32_t kChunk = 8192;
    const std::uint32_t n_chunks = (spec.n_bar + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks, 0.0);

#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        const std::uint32_t begin = static_cast<std::uint32_t>(c) * kChunk + 1;
        const std::uint32_t end =
            std::min(spec.n_bar, static_cast<std::uint32_t>(c + 1) * kChunk);
        KahanSum local;
        for (std::uint32_t k = begin; k <= end; ++k) local.add(unnormalized(spec, k));
        partial[static_cast<std::size_t>(c)] = local.sum;
    }

    KahanSum total;
    for (const double p : partial) total.add(p);
    return finish_normalization(total.sum);
}

double NormalizedZipfModel::evaluate(std::uint32_t k) const {
    return normalization * unnormalized(spec, k);
}

NormalizedZipfModel normalized_model(const ZipfModelSpec& spec) {
    return {spec, normalize(spec)};
}

PValue chi2_pvalue(double chi2, std::size_t dof) {
    PValue result;
    result.p = chi_square_survival(chi2, dof);
    result.underflow = result.p < std::numeric_limits<double>::min();
    if (result.underflow) result.p = 0.0;
    return result;
}

namespace {

struct ObservedFrequencies {
    std::vector<double> f;   // f[k-1] over the full table
    double total = 0.0;
    bool has_counts = false;
};

ObservedFrequencies observed_frequencies(const RankedSlice& observed) {
    ObservedFrequencies out;
    out.has_counts = !observed.counts.empty();
    const std::size_t n = observed.size();
    out.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.f[i] = observed.count_at_rank(static_cast<Rank>(i + 1));
        out.total += out.f[i];
    }
    for (double& v : out.f) v /= out.total;
    return out;
}

double chi2_frequency(const NormalizedZipfModel& model, const ObservedFrequencies& obs,
                      std::uint32_t k_min, std::uint32_t k_max) {
    double chi2 = 0.0;
    for (std::uint32_t k = k_min; k <= k_max; ++k) {
        const double fm = model.evaluate(k);
        const double diff = obs.f[k - 1] - fm;
        chi2 += diff * diff / fm;
    }
    return chi2;
}

struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;
};

// Parameter layout per family (k_c handled separately for m5):
//   m1: [a]   m2: [a, b]   m3: [a, alpha]   m4: [a, b, alpha]   m5: [a]
Bounds parameter_bounds(ZipfModel family) {
    switch (family) {
        case ZipfModel::PureZipf:
        case ZipfModel::DoubleZipf: return {{1e-6}, {4.0}};
        case ZipfModel::ExpCutoff: return {{1e-6, 0.0}, {4.0, 1.0}};
        case ZipfModel::FiniteSize: return {{1e-6, 0.0}, {4.0, 10.0}};
        case ZipfModel::FiniteSizeExpCutoff: return {{1e-6, 0.0, 0.0}, {4.0, 1.0, 10.0}};
    }
    return {};
}

std::vector<std::vector<double>> multi_starts(ZipfModel family) {
    switch (family) {
        case ZipfModel::PureZipf:
        case ZipfModel::DoubleZipf:
            return {{0.25}, {0.75}, {1.0}, {1.25}, {1.75}, {2.5}, {3.25}, {3.9}};
        case ZipfModel::ExpCutoff:
            return {{0.8, 0.001}, {1.0, 0.01},  {1.2, 1e-4}, {1.0, 0.1},
                    {1.5, 0.001}, {2.0, 0.01},  {0.5, 0.5},  {3.0, 0.9}};
        case ZipfModel::FiniteSize:
            return {{0.8, 0.1}, {1.0, 0.5}, {1.2, 1.0}, {1.5, 2.0},
                    {0.5, 5.0}, {2.0, 0.2}, {1.0, 8.0}, {3.0, 4.0}};
        case ZipfModel::FiniteSizeExpCutoff:
            return {{1.0, 0.001, 0.1}, {1.0, 0.01, 0.5}, {0.8, 1e-4, 0.0},
                    {1.2, 0.0, 1.0},   {1.5, 0.05, 2.0}, {2.0, 0.001, 5.0},
                    {0.5, 0.2, 0.5},   {3.0, 0.5, 8.0}};
    }
    return {};
}

ZipfModelSpec spec_from_params(ZipfModel family, std::span<const double> p,
                               std::uint32_t k_c, std::uint32_t n_bar) {
    ZipfModelSpec spec;
    spec.family = family;
    spec.n_bar = n_bar;
    spec.k_c = k_c;
    spec.a = p[0];
    switch (family) {
        case ZipfModel::ExpCutoff: spec.b = p[1]; break;
        case ZipfModel::FiniteSize: spec.alpha = p[1]; break;
        case ZipfModel::FiniteSizeExpCutoff:
            spec.b = p[1];
            spec.alpha = p[2];
            break;
        default: break;
    }
    return spec;
}

struct ContinuousFit {
    std::vector<double> params;
    double chi2 = std::numeric_limits<double>::infinity();
};

// Best continuous parameters for a family (k_c fixed for m5): clamped
// simplex descent with a quadratic out-of-bounds penalty, best of the
// deterministic multi-starts.
ContinuousFit fit_continuous(ZipfModel family, std::uint32_t k_c,
                             const ObservedFrequencies& obs, std::uint32_t n_bar,
                             std::uint32_t k_min, std::uint32_t k_max) {
    const Bounds bounds = parameter_bounds(family);
    const std::size_t dim = bounds.lo.size();

    const auto objective = [&](std::span<const double> raw) {
        std::vector<double> clamped(raw.begin(), raw.end());
        double excess = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double c = std::clamp(raw[i], bounds.lo[i], bounds.hi[i]);
            excess += (raw[i] - c) * (raw[i] - c);
            clamped[i] = c;
        }
        const ZipfModelSpec spec = spec_from_params(family, clamped, k_c, n_bar);
        const NormalizedZipfModel model{spec, normalize_serial(spec)};
        const double chi2 = chi2_frequency(model, obs, k_min, k_max);
        return chi2 * (1.0 + 10.0 * excess) + excess;
    };

    SimplexOptions options;
    options.max_iterations = 2000;
    options.f_tolerance = 1e-15;
    options.x_tolerance = 1e-10;

    ContinuousFit best;
    for (const auto& start : multi_starts(family)) {
        std::vector<double> steps(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            steps[i] = 0.1 * (bounds.hi[i] - bounds.lo[i]);
        }
        SimplexResult result;
        try {
            result = minimize_simplex(objective, start, steps, options);
        } catch (const FitError& e) {
            result.x = e.best_params();
            result.value = e.best_value();
        }
        if (result.value < best.chi2) {
            for (std::size_t i = 0; i < dim; ++i) {
                result.x[i] = std::clamp(result.x[i], bounds.lo[i], bounds.hi[i]);
            }
            best.params = result.x;
            best.chi2 = result.value;
        }
    }
    if (!std::isfinite(best.chi2)) {
        throw FitError("zipf fit did not produce a finite chi-square", best.params,
                       best.chi2, 0);
    }
    return best;
}

std::vector<std::uint32_t> log_spaced_crossovers(std::uint32_t n_bar) {
    std::set<std::uint32_t> grid;
    const int points = 24;
    const double top = std::log10(static_cast<double>(n_bar));
    for (int i = 0; i <= points; ++i) {
        const double x = top * static_cast<double>(i) / points;
        grid.insert(static_cast<std::uint32_t>(
            std::clamp(std::pow(10.0, x), 1.0, static_cast<double>(n_bar))));
    }
    return {grid.begin(), grid.end()};
}

}  // namespace

double zipf_chi2(const NormalizedZipfModel& model, const RankedSlice& observed,
                 const ZipfFitOptions& options) {
    const std::uint32_t n = static_cast<std::uint32_t>(observed.size());
    const std::uint32_t k_max = options.k_max == 0 ? n : options.k_max;
    if (options.k_min < 1 || options.k_min > k_max || k_max > n) {
        throw DomainError("zipf_chi2: invalid rank range");
    }
    const ObservedFrequencies obs = observed_frequencies(observed);
    const double chi2 = chi2_frequency(model, obs, options.k_min, k_max);
    return obs.has_counts ? chi2 * obs.total : chi2;
}

ZipfModelFit fit_zipf_model(ZipfModel family, const RankedSlice& observed,
                            const ZipfFitOptions& options) {
    const auto n = static_cast<std::uint32_t>(observed.size());
    if (n < 3) throw DomainError("fit_zipf_model: table too small");
    const std::uint32_t k_max = options.k_max == 0 ? n : options.k_max;
    if (options.k_min < 1 || options.k_min > k_max || k_max > n) {
        throw DomainError("fit_zipf_model: invalid rank range");
    }

    const ObservedFrequencies obs = observed_frequencies(observed);

    std::uint32_t best_kc = 1;
    ContinuousFit best;
    if (family == ZipfModel::DoubleZipf) {
        for (const std::uint32_t kc : log_spaced_crossovers(n)) {
            const ContinuousFit fit = fit_continuous(family, kc, obs, n, options.k_min, k_max);
            if (fit.chi2 < best.chi2) {
                best = fit;
                best_kc = kc;
            }
        }
        // Local refinement: integer hill climb around the best grid point.
        bool improved = true;
        std::size_t moves = 0;
        while (improved && moves < 200) {
            improved = false;
            for (const std::int64_t delta : {-1, +1}) {
                const std::int64_t candidate = static_cast<std::int64_t>(best_kc) + delta;
                if (candidate < 1 || candidate > static_cast<std::int64_t>(n)) continue;
                const ContinuousFit fit =
                    fit_continuous(family, static_cast<std::uint32_t>(candidate), obs, n,
                                   options.k_min, k_max);
                if (fit.chi2 < best.chi2) {
                    best = fit;
                    best_kc = static_cast<std::uint32_t>(candidate);
                    improved = true;
                }
            }
            ++moves;
        }
    } else {
        best = fit_continuous(family, 1, obs, n, options.k_min, k_max);
    }

    ZipfModelFit fit;
    fit.model =
        normalized_model(spec_from_params(family, best.params, best_kc, n));
    const double chi2 = chi2_frequency(fit.model, obs, options.k_min, k_max);
    fit.chi2 = obs.has_counts ? chi2 * obs.total : chi2;
    fit.statistic = obs.has_counts ? "pearson" : "frequency";

    const std::size_t ranks_in_range = k_max - options.k_min + 1;
    const std::size_t params = free_parameter_count(family);
    if (ranks_in_range <= params + 1) {
        throw DomainError("fit_zipf_model: not enough ranks for a dof >= 1");
    }
    fit.dof = ranks_in_range - params - 1;
    fit.p_value = chi2_pvalue(fit.chi2, fit.dof);
    return fit;
}

std::vector<std::pair<std::uint32_t, double>> model_ratio_curve(
    const ZipfModelFit& fit, const RankedSlice& observed, const ZipfFitOptions& options,
    std::size_t* excluded) {
    const auto n = static_cast<std::uint32_t>(observed.size());
    const std::uint32_t k_max = options.k_max == 0 ? n : options.k_max;
    if (options.k_min < 1 || options.k_min > k_max || k_max > n) {
        throw DomainError("model_ratio_curve: invalid rank range");
    }
    const ObservedFrequencies obs = observed_frequencies(observed);

    std::vector<std::pair<std::uint32_t, double>> curve;
    curve.reserve(k_max - options.k_min + 1);
    std::size_t skipped = 0;
    for (std::uint32_t k = options.k_min; k <= k_max; ++k) {
        const double fm = fit.model.evaluate(k);
        const double fo = obs.f[k - 1];
        if (fm <= 0.0 || fo <= 0.0) {
            ++skipped;
            continue;
        }
        curve.emplace_back(k, std::log10(fo / fm));
    }
    if (excluded) *excluded = skipped;
    return curve;
}

}  // namespace rankdiv

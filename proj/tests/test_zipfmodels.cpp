#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rankdiv/errors.hpp"
#include "rankdiv/zipf_models.hpp"

using namespace rankdiv;

namespace {

// A standalone observed table with the given counts (descending).
RankedSlice observed_slice(const std::vector<double>& counts) {
    RankedSlice slice;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        slice.ids.push_back(static_cast<TokenId>(i));
        slice.counts.push_back(counts[i]);
    }
    return slice;
}

RankedSlice slice_from_model(const ZipfModelSpec& spec, double total) {
    const NormalizedZipfModel model = normalized_model(spec);
    std::vector<double> counts;
    counts.reserve(spec.n_bar);
    for (std::uint32_t k = 1; k <= spec.n_bar; ++k) counts.push_back(model.evaluate(k) * total);
    return observed_slice(counts);
}

ZipfModelSpec random_spec(ZipfModel family, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> a(0.2, 3.5);
    std::uniform_real_distribution<double> b(0.0, 0.3);
    std::uniform_real_distribution<double> alpha(0.0, 4.0);
    std::uniform_int_distribution<std::uint32_t> n_bar(10, 3000);
    ZipfModelSpec spec;
    spec.family = family;
    spec.n_bar = n_bar(gen);
    spec.a = a(gen);
    if (family == ZipfModel::ExpCutoff || family == ZipfModel::FiniteSizeExpCutoff) {
        spec.b = b(gen);
    }
    if (family == ZipfModel::FiniteSize || family == ZipfModel::FiniteSizeExpCutoff) {
        spec.alpha = alpha(gen);
    }
    if (family == ZipfModel::DoubleZipf) {
        spec.k_c = 1 + std::uniform_int_distribution<std::uint32_t>(0, spec.n_bar - 1)(gen);
    }
    return spec;
}

constexpr ZipfModel kAllFamilies[] = {ZipfModel::PureZipf, ZipfModel::ExpCutoff,
                                      ZipfModel::FiniteSize, ZipfModel::FiniteSizeExpCutoff,
                                      ZipfModel::DoubleZipf};

}  // namespace

TEST_CASE("normalization by hand: m1 with a = 1, three ranks") {
    const ZipfModelSpec spec{ZipfModel::PureZipf, 1.0, 0, 0, 1, 3};
    CHECK(normalize(spec) == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
    CHECK(normalize_serial(spec) == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("evaluate sums to one for random parameter sets") {
    std::mt19937_64 gen(2025);
    for (const ZipfModel family : kAllFamilies) {
        for (int trial = 0; trial < 40; ++trial) {
            const ZipfModelSpec spec = random_spec(family, gen);
            const NormalizedZipfModel model = normalized_model(spec);
            double sum = 0.0;
            for (std::uint32_t k = 1; k <= spec.n_bar; ++k) sum += model.evaluate(k);
            INFO(model_id(family), " trial ", trial, " n_bar ", spec.n_bar);
            CHECK(std::fabs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("degenerate reductions: m2(b=0) = m1, m3(alpha=0) = m1") {
    const ZipfModelSpec m1{ZipfModel::PureZipf, 1.3, 0, 0, 1, 500};
    const ZipfModelSpec m2{ZipfModel::ExpCutoff, 1.3, 0.0, 0, 1, 500};
    const ZipfModelSpec m3{ZipfModel::FiniteSize, 1.3, 0, 0.0, 1, 500};
    const auto e1 = normalized_model(m1);
    const auto e2 = normalized_model(m2);
    const auto e3 = normalized_model(m3);
    for (std::uint32_t k = 1; k <= 500; k += 7) {
        CHECK(e2.evaluate(k) == doctest::Approx(e1.evaluate(k)).epsilon(1e-14));
        CHECK(e3.evaluate(k) == doctest::Approx(e1.evaluate(k)).epsilon(1e-14));
    }
}

TEST_CASE("m5 is continuous at k_c and strictly decreasing") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ZipfModelSpec spec = random_spec(ZipfModel::DoubleZipf, gen);
        // Continuity: the k > k_c branch extended to k_c equals 1/k_c.
        const double below = 1.0 / static_cast<double>(spec.k_c);
        const double above = std::pow(static_cast<double>(spec.k_c), spec.a - 1.0) *
                             std::pow(static_cast<double>(spec.k_c), -spec.a);
        CHECK(std::fabs(above - below) <= 1e-12 * below);
        CHECK(unnormalized(spec, spec.k_c) == below);

        const NormalizedZipfModel model = normalized_model(spec);
        for (std::uint32_t k = 1; k < spec.n_bar; k += std::max(1u, spec.n_bar / 97)) {
            CHECK(model.evaluate(k) > model.evaluate(k + 1));
        }
    }
}

TEST_CASE("evaluate rejects out-of-range ranks") {
    const ZipfModelSpec spec{ZipfModel::PureZipf, 1.0, 0, 0, 1, 10};
    CHECK_THROWS_AS(unnormalized(spec, 0), DomainError);
    CHECK_THROWS_AS(unnormalized(spec, 11), DomainError);
    CHECK_THROWS_AS(normalize(ZipfModelSpec{ZipfModel::PureZipf, 0.0, 0, 0, 1, 10}),
                    DomainError);
    CHECK_THROWS_AS(normalize(ZipfModelSpec{ZipfModel::DoubleZipf, 1.0, 0, 0, 11, 10}),
                    DomainError);
}

TEST_CASE("chi-square on a 10-word toy equals direct arithmetic") {
    const std::vector<double> counts = {100, 60, 35, 20, 15, 11, 8, 6, 4, 2};
    const RankedSlice observed = observed_slice(counts);
    const ZipfModelSpec spec{ZipfModel::PureZipf, 1.0, 0, 0, 1, 10};
    const NormalizedZipfModel model = normalized_model(spec);

    // Independent route: plain loops, explicit normalization constant.
    double total = 0.0;
    for (const double c : counts) total += c;
    double harmonic = 0.0;
    for (int k = 1; k <= 10; ++k) harmonic += 1.0 / k;
    double expected = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double fo = counts[static_cast<std::size_t>(k - 1)] / total;
        const double fm = (1.0 / k) / harmonic;
        expected += (fo - fm) * (fo - fm) / fm;
    }
    expected *= total;  // counts present: Pearson scaling

    CHECK(zipf_chi2(model, observed) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("chi2_pvalue closed forms and monotonicity") {
    CHECK(chi2_pvalue(0.0, 4).p == 1.0);
    CHECK(chi2_pvalue(2.0 * std::log(2.0), 2).p == doctest::Approx(0.5).epsilon(1e-9));

    double previous = 1.1;
    for (double chi2 = 0.0; chi2 <= 30.0; chi2 += 0.5) {
        const PValue pv = chi2_pvalue(chi2, 5);
        CHECK(pv.p < previous);
        previous = pv.p;
    }

    const PValue tiny = chi2_pvalue(5e6, 3);
    CHECK(tiny.underflow);
    CHECK(tiny.p == 0.0);
    CHECK_FALSE(chi2_pvalue(10.0, 3).underflow);
}

TEST_CASE("fit recovers m1 parameters from exact data") {
    ZipfModelSpec truth{ZipfModel::PureZipf, 1.05, 0, 0, 1, 10000};
    const RankedSlice observed = slice_from_model(truth, 1e9);
    const ZipfModelFit fit = fit_zipf_model(ZipfModel::PureZipf, observed);
    CHECK(fit.model.spec.a == doctest::Approx(1.05).epsilon(0.01 / 1.05));
    CHECK(fit.chi2 < 1e-6);
    CHECK(fit.statistic == "pearson");
    CHECK(fit.dof == 10000 - 1 - 1);
    CHECK(fit.p_value.p == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the double Zipf wins on double-Zipf data") {
    ZipfModelSpec truth{ZipfModel::DoubleZipf, 1.9, 0, 0, 80, 2000};
    const RankedSlice observed = slice_from_model(truth, 5e8);

    ZipfModelFit best_m5 = fit_zipf_model(ZipfModel::DoubleZipf, observed);
    CHECK(best_m5.model.spec.k_c == 80);
    CHECK(best_m5.model.spec.a == doctest::Approx(1.9).epsilon(0.01));

    for (const ZipfModel family :
         {ZipfModel::PureZipf, ZipfModel::ExpCutoff, ZipfModel::FiniteSize,
          ZipfModel::FiniteSizeExpCutoff}) {
        const ZipfModelFit other = fit_zipf_model(family, observed);
        INFO(model_id(family));
        CHECK(best_m5.chi2 < other.chi2);
    }
}

TEST_CASE("nesting: m4 never loses to its parameter slices") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 3; ++trial) {
        // Data from m4 itself with mild parameters.
        ZipfModelSpec truth{ZipfModel::FiniteSizeExpCutoff, 0.9 + 0.2 * trial,
                            0.002 * (trial + 1), 0.5 * trial, 1, 300};
        RankedSlice observed = slice_from_model(truth, 1e7);
        // Perturb slightly so no family fits exactly.
        std::uniform_real_distribution<double> jitter(0.98, 1.02);
        for (auto& c : observed.counts) c *= jitter(gen);
        std::sort(observed.counts.rbegin(), observed.counts.rend());

        const double m4 = fit_zipf_model(ZipfModel::FiniteSizeExpCutoff, observed).chi2;
        const double m2 = fit_zipf_model(ZipfModel::ExpCutoff, observed).chi2;
        const double m3 = fit_zipf_model(ZipfModel::FiniteSize, observed).chi2;
        CHECK(m4 <= m2 * (1.0 + 1e-6) + 1e-9);
        CHECK(m4 <= m3 * (1.0 + 1e-6) + 1e-9);
    }
}

TEST_CASE("model_ratio_curve") {
    const std::vector<double> counts = {50, 25, 10, 5, 5, 3, 2, 1, 1, 1};
    RankedSlice observed = observed_slice(counts);
    ZipfModelFit fit = fit_zipf_model(ZipfModel::PureZipf, observed);

    // Observed == model: all points vanish.
    const RankedSlice exact = slice_from_model(fit.model.spec, 1000.0);
    ZipfModelFit self = fit;
    const auto zeros = model_ratio_curve(self, exact);
    for (const auto& [k, ratio] : zeros) CHECK(std::fabs(ratio) < 1e-9);

    // Doubling the observation at one rank: the ratio there becomes
    // 2 / (1 + f_model(5)) since the total grows by the extra count.
    RankedSlice doubled = exact;
    doubled.counts[4] *= 2.0;
    const auto curve = model_ratio_curve(self, doubled);
    double at5 = 0.0;
    for (const auto& [k, ratio] : curve) {
        if (k == 5) at5 = ratio;
    }
    const double f5 = fit.model.evaluate(5);
    CHECK(at5 == doctest::Approx(std::log10(2.0 / (1.0 + f5))).epsilon(1e-9));

    std::size_t excluded = 0;
    RankedSlice with_zero = exact;
    with_zero.counts.back() = 0.0;
    model_ratio_curve(self, with_zero, {}, &excluded);
    CHECK(excluded == 1);
}

TEST_CASE("fit range restriction changes the dof") {
    const RankedSlice observed = slice_from_model({ZipfModel::PureZipf, 1.2, 0, 0, 1, 200}, 1e6);
    ZipfFitOptions options;
    options.k_min = 10;
    const ZipfModelFit fit = fit_zipf_model(ZipfModel::PureZipf, observed, options);
    CHECK(fit.dof == (200 - 10 + 1) - 1 - 1);
    CHECK_THROWS_AS(fit_zipf_model(ZipfModel::PureZipf, observed, {.k_min = 300}), DomainError);
}

TEST_CASE("model ids round-trip") {
    for (const ZipfModel family : kAllFamilies) {
        CHECK(model_from_id(model_id(family)) == family);
    }
    CHECK_THROWS_AS(model_from_id("m9"), DomainError);
}

// Timing harness for the OpenMP kernels against their serial reference
// implementations. Also cross-checks that both paths agree, so a benchmark
// run doubles as a consistency sweep at larger-than-test sizes.
//
// Usage: rankdiv_bench [scale]   (scale multiplies the default problem sizes)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "rankdiv/diversity.hpp"
#include "rankdiv/dynamics.hpp"
#include "rankdiv/ingest.hpp"
#include "rankdiv/rank_table.hpp"
#include "rankdiv/walker.hpp"
#include "rankdiv/zipf_models.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rankdiv;
namespace fs = std::filesystem;

namespace {

double seconds(const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    body();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* kernel, double serial, double parallel, bool equal) {
    std::printf("%-28s %10.3f ms %10.3f ms %7.2fx   %s\n", kernel, serial * 1e3,
                parallel * 1e3, serial / parallel, equal ? "outputs match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const double scale = argc > 1 ? std::stod(argv[1]) : 1.0;
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d, scale %.2f\n", omp_get_max_threads(), scale);
#else
    std::printf("built without OpenMP; both columns run serially (scale %.2f)\n", scale);
#endif
    std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

    const auto n_items = static_cast<std::uint32_t>(50000 * scale);
    const auto n_steps = static_cast<std::uint32_t>(100 * scale);

    // Walker simulation (counter-based draws + re-rank each step).
    WalkConfig config;
    config.n_items = n_items;
    config.n_steps = n_steps;
    config.sigma_hat = 0.0575;
    config.seed = 9;
    RankedCorpus corpus, corpus_serial;
    {
        const double t_par = seconds([&] { corpus = simulate(config); });
        const double t_ser = seconds([&] { corpus_serial = simulate_serial(config); });
        bool equal = corpus.slice_count() == corpus_serial.slice_count();
        for (std::size_t s = 0; equal && s < corpus.slice_count(); ++s) {
            equal = corpus.slices[s].ids == corpus_serial.slices[s].ids;
        }
        row("walker simulate", t_ser, t_par, equal);
        corpus_serial = RankedCorpus{};
    }

    // Rank diversity (distinct count per rank).
    {
        DiversityCurve par, ser;
        const double t_par = seconds([&] { par = rank_diversity(corpus, n_items); });
        const double t_ser = seconds([&] { ser = rank_diversity_serial(corpus, n_items); });
        row("rank_diversity", t_ser, t_par, par.raw == ser.raw);
    }

    // Flight histogram over the body of the ranking.
    {
        FlightHistogram par, ser;
        const Rank hi = n_items / 2;
        const double t_par = seconds([&] { par = flight_histogram(corpus, 10, hi, 0.005); });
        const double t_ser =
            seconds([&] { ser = flight_histogram_serial(corpus, 10, hi, 0.005); });
        bool equal = par.sample_count == ser.sample_count && par.bins.size() == ser.bins.size();
        for (std::size_t i = 0; equal && i < par.bins.size(); ++i) {
            equal = par.bins[i].center == ser.bins[i].center &&
                    par.bins[i].density == ser.bins[i].density;
        }
        row("flight_histogram", t_ser, t_par, equal);
    }

    // Per-token flight statistics reduced to sigma_hat.
    {
        SigmaHatResult par, ser;
        const double t_par = seconds([&] { par = sigma_hat(corpus, n_items); });
        const double t_ser = seconds([&] { ser = sigma_hat_serial(corpus, n_items); });
        row("sigma_hat", t_ser, t_par, par.value == ser.value && par.token_count == ser.token_count);
    }

    // Zipf normalization sum (chunked deterministic reduction).
    {
        ZipfModelSpec spec;
        spec.family = ZipfModel::FiniteSizeExpCutoff;
        spec.a = 1.05;
        spec.b = 1e-6;
        spec.alpha = 1.2;
        spec.n_bar = static_cast<std::uint32_t>(5e6 * scale);
        double par = 0.0, ser = 0.0;
        const double t_par = seconds([&] { par = normalize(spec); });
        const double t_ser = seconds([&] { ser = normalize_serial(spec); });
        row("zipf normalize", t_ser, t_par, std::fabs(par - ser) <= 1e-12 * ser);
    }

    // Streaming ingestion over multiple files.
    {
        const fs::path dir = fs::temp_directory_path() / "rankdiv_bench_ingest";
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::mt19937_64 gen(4);
        std::uniform_int_distribution<int> tok(0, 20000);
        std::uniform_int_distribution<int> year(1900, 1919);
        std::uniform_int_distribution<int> count(1, 500);
        std::vector<fs::path> paths;
        for (int f = 0; f < 8; ++f) {
            const fs::path path = dir / ("part" + std::to_string(f) + ".tsv");
            std::ofstream out(path);
            const int lines = static_cast<int>(120000 * scale);
            for (int i = 0; i < lines; ++i) {
                out << "token" << tok(gen) << '\t' << year(gen) << '\t' << count(gen) << "\t1\n";
            }
            paths.push_back(path);
        }
        IngestOptions options;
        options.policy.lowercase = true;
        IngestResult par, ser;
        const double t_par = seconds([&] { par = ingest_files(paths, options); });
        const double t_ser = seconds([&] { ser = ingest_files_serial(paths, options); });
        bool equal = par.tables.size() == ser.tables.size();
        for (std::size_t i = 0; equal && i < par.tables.size(); ++i) {
            equal = par.tables[i].entries == ser.tables[i].entries;
        }
        row("ingest (8 files)", t_ser, t_par, equal);
        fs::remove_all(dir);
    }

    return 0;
}

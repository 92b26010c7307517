// Command-line front end: wires ingestion, ranking, diversity analysis,
// flight statistics, simulation, model fitting, and overlap into
// reproducible pipelines. Every command writes a manifest next to its
// outputs; `replay` re-runs a manifest and verifies byte identity.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rankdiv/diversity.hpp"
#include "rankdiv/dynamics.hpp"
#include "rankdiv/errors.hpp"
#include "rankdiv/ingest.hpp"
#include "rankdiv/io.hpp"
#include "rankdiv/rank_table.hpp"
#include "rankdiv/walker.hpp"
#include "rankdiv/zipf_models.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rankdiv;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    json parameters = json::object();
    std::optional<std::uint64_t> seed;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;

    void write(const fs::path& out_dir) const {
        json doc;
        doc["tool"] = "rankdiv";
        doc["version"] = kVersion;
        doc["command"] = command;
        doc["argv"] = argv;
        doc["parameters"] = parameters;
        if (seed) doc["seed"] = *seed;
        doc["inputs"] = json::array();
        for (const auto& path : inputs) {
            doc["inputs"].push_back({{"path", path.string()}, {"fnv1a64", path_digest(path)}});
        }
        doc["outputs"] = json::array();
        for (const auto& path : outputs) {
            doc["outputs"].push_back({{"path", path.string()}, {"fnv1a64", file_digest(path)}});
        }
        atomic_write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
    }
};

std::uint64_t resolve_seed(std::optional<std::uint64_t>& seed, std::vector<std::string>& argv) {
    if (!seed) {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        argv.push_back("--seed");
        argv.push_back(std::to_string(*seed));
        std::cerr << "seed not given; using " << *seed << " (recorded in the manifest)\n";
    }
    return *seed;
}

void write_output(Manifest& manifest, const fs::path& path, std::string_view content) {
    atomic_write_file(path, content);
    manifest.outputs.push_back(path);
}

std::pair<int, int> parse_span(const std::string& text, const char* what) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError(std::string(what) + " must look like FIRST:LAST");
    }
    try {
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + " must hold two integers");
    }
}

RankedCorpus load_window(const fs::path& dir, const std::string& window) {
    RankedCorpus corpus = load_corpus_dir(dir);
    if (window.empty()) return corpus;
    const auto [first, last] = parse_span(window, "--window");
    RankedCorpus filtered;
    filtered.vocab = std::move(corpus.vocab);
    for (auto& slice : corpus.slices) {
        if (slice.slice >= first && slice.slice <= last) {
            filtered.slices.push_back(std::move(slice));
        }
    }
    if (filtered.slices.size() < 2) {
        throw DataError("window [" + std::to_string(first) + ", " + std::to_string(last) +
                        "] selects " + std::to_string(filtered.slices.size()) +
                        " slices; need at least 2");
    }
    return filtered;
}

json fit_to_json(const SigmoidFit& fit) {
    return {{"mu", fit.mu},
            {"sigma", fit.sigma},
            {"mse", fit.mse},
            {"k_minus", fit.k_minus},
            {"k_plus", fit.k_plus}};
}

json pvalue_to_json(const PValue& p) {
    if (p.underflow) return "< 2.3e-308";
    return p.p;
}

// ----- subcommand bodies ---------------------------------------------------

struct IngestArgs {
    std::vector<std::string> inputs;
    fs::path out;
    std::string format = "ngram";
    bool strip_pos_tags = false;
    bool lowercase = false;
    bool alphabetic_only = false;
    double min_count = 0.0;
    int first = std::numeric_limits<int>::min();
    int last = std::numeric_limits<int>::max();
    bool strict = false;
};

int cmd_ingest(const IngestArgs& args, Manifest& manifest) {
    IngestOptions options;
    options.policy = {args.strip_pos_tags, args.lowercase, args.alphabetic_only,
                      args.min_count};
    options.range = {args.first, args.last};
    options.format = args.format == "csv" ? CorpusFormat::GenericCsv : CorpusFormat::NgramTsv;
    options.strict = args.strict;

    std::vector<fs::path> paths;
    for (const auto& input : args.inputs) {
        if (!fs::is_regular_file(input)) throw DataError("no such input file", input, 0);
        paths.emplace_back(input);
        manifest.inputs.emplace_back(input);
    }

    const IngestResult result = ingest_files(paths, options);
    fs::create_directories(args.out);
    for (const auto& table : result.tables) {
        write_output(manifest, args.out / (std::to_string(table.slice) + ".tsv"),
                     to_tsv(table));
        std::cout << "slice " << table.slice << ": " << table.entries.size()
                  << " tokens, total count " << format_number(table.total) << "\n";
    }
    std::cout << "lines read: " << result.stats.lines_read
              << ", records: " << result.stats.records_parsed
              << ", malformed skipped: " << result.stats.malformed_lines
              << ", rejected tokens: " << result.stats.rejected_tokens << "\n";
    return kOk;
}

struct TablesArgs {
    fs::path tables;
    fs::path out;
};

int cmd_rank(const TablesArgs& args, Manifest& manifest) {
    const RankedCorpus corpus = load_corpus_dir(args.tables);
    manifest.inputs.push_back(args.tables);
    fs::create_directories(args.out);
    for (const auto& slice : corpus.slices) {
        write_output(manifest, args.out / (std::to_string(slice.slice) + ".tsv"),
                     rank_slice_to_tsv(corpus, slice));
    }
    std::cout << "ranked " << corpus.slice_count() << " slices, vocabulary "
              << corpus.vocab.size() << "\n";
    return kOk;
}

struct DiversityArgs {
    fs::path tables;
    fs::path out;
    std::string window;
    std::uint32_t k_max = 0;
    double delta = 0.1;
};

int cmd_diversity(const DiversityArgs& args, Manifest& manifest) {
    const RankedCorpus corpus = load_window(args.tables, args.window);
    manifest.inputs.push_back(args.tables);
    const Rank k_max = args.k_max == 0
                           ? static_cast<Rank>(corpus.min_slice_size())
                           : static_cast<Rank>(args.k_max);

    const DiversityCurve curve = log_window(rank_diversity(corpus, k_max), args.delta);
    const SigmoidFit fit = fit_sigmoid(curve);

    fs::create_directories(args.out);
    write_output(manifest, args.out / "diversity_raw.csv", raw_curve_csv(curve));
    write_output(manifest, args.out / "diversity_windowed.csv",
                 windowed_curve_csv(curve, fit));
    json report = fit_to_json(fit);
    report["T"] = curve.slice_count;
    report["window"] = {{"first", curve.first_slice}, {"last", curve.last_slice}};
    report["k_max"] = k_max;
    report["delta"] = args.delta;
    write_output(manifest, args.out / "fit.json", report.dump(2) + "\n");
    std::printf("mu=%.4f sigma=%.4f mse=%.3g k-=%.1f k+=%.1f\n", fit.mu, fit.sigma, fit.mse,
                fit.k_minus, fit.k_plus);
    return kOk;
}

struct FlightsArgs {
    fs::path tables;
    fs::path out;
    std::string band = "1:10";
    double binwidth = 0.01;
    std::uint32_t k_max = 0;
};

int cmd_flights(const FlightsArgs& args, Manifest& manifest) {
    const RankedCorpus corpus = load_corpus_dir(args.tables);
    manifest.inputs.push_back(args.tables);
    const auto [lo, hi] = parse_span(args.band, "--band");
    if (lo < 1 || hi < lo) throw DataError("invalid band " + args.band);

    const FlightHistogram hist = flight_histogram(corpus, static_cast<Rank>(lo),
                                                  static_cast<Rank>(hi), args.binwidth);
    const Rank k_max = args.k_max == 0
                           ? static_cast<Rank>(corpus.min_slice_size())
                           : static_cast<Rank>(args.k_max);
    const SigmaHatResult sigma = sigma_hat(corpus, k_max);

    std::string csv = "bin_center,density\n";
    for (const auto& bin : hist.bins) {
        csv += format_number(bin.center) + "," + format_number(bin.density) + "\n";
    }
    fs::create_directories(args.out);
    write_output(manifest, args.out / "flight_histogram.csv", csv);

    json report;
    report["band"] = {{"lo", lo}, {"hi", hi}};
    report["bin_width"] = args.binwidth;
    report["sample_count"] = hist.sample_count;
    report["sigma_hat"] = sigma.value;
    report["sigma_hat_tokens"] = sigma.token_count;
    if (sigma.degenerate) report["sigma_hat_degenerate"] = true;
    for (const auto family : {DistributionFamily::Gaussian, DistributionFamily::Lorentzian}) {
        try {
            const DistributionFit fit = fit_flight_distribution(hist, family);
            report[to_string(family)] = {{"location", fit.location},
                                         {"scale", fit.scale},
                                         {"sse", fit.sse}};
        } catch (const std::exception& ex) {
            report[to_string(family)] = {{"error", ex.what()}};
        }
    }
    write_output(manifest, args.out / "flight_fits.json", report.dump(2) + "\n");
    if (sigma.degenerate) {
        std::cerr << "warning: every eligible token is frozen in rank; sigma_hat is 0\n";
    }
    std::printf("flights=%zu sigma_hat=%.4f\n", hist.sample_count, sigma.value);
    return kOk;
}

struct CorrelationArgs {
    fs::path tables;
    fs::path out;
    std::size_t sample_size = 50;
    std::size_t tau_max = 10;
    std::string format = "csv";
};

int cmd_correlation(const CorrelationArgs& args, Manifest& manifest,
                    std::uint64_t seed) {
    const RankedCorpus corpus = load_corpus_dir(args.tables);
    manifest.inputs.push_back(args.tables);
    const auto c = averaged_correlation(corpus, args.sample_size, args.tau_max, seed);

    fs::create_directories(args.out);
    if (args.format == "json") {
        json doc = {{"sample_size", args.sample_size}, {"seed", seed}, {"C", c}};
        write_output(manifest, args.out / "correlation.json", doc.dump(2) + "\n");
    } else {
        std::string csv = "tau,C\n";
        for (std::size_t tau = 0; tau < c.size(); ++tau) {
            csv += std::to_string(tau) + "," + format_number(c[tau]) + "\n";
        }
        write_output(manifest, args.out / "correlation.csv", csv);
    }
    std::printf("C_1=%.4f over %zu sampled ranks\n", c.size() > 1 ? c[1] : 1.0,
                args.sample_size);
    return kOk;
}

struct SimulateArgs {
    fs::path out;
    std::uint32_t n_items = 0;
    std::uint32_t n_steps = 0;
    double sigma_hat = 0.0;
    std::uint32_t burn_in = 50;
};

int cmd_simulate(const SimulateArgs& args, Manifest& manifest, std::uint64_t seed) {
    WalkConfig config;
    config.n_items = args.n_items;
    config.n_steps = args.n_steps;
    config.sigma_hat = args.sigma_hat;
    config.seed = seed;
    config.burn_in = args.burn_in;

    const RankedCorpus corpus = simulate(config);
    fs::create_directories(args.out);
    for (const auto& slice : corpus.slices) {
        write_output(manifest, args.out / (std::to_string(slice.slice) + ".tsv"),
                     rank_slice_to_tsv(corpus, slice));
    }
    std::cout << "simulated " << args.n_steps << " slices of " << args.n_items
              << " items (sigma_hat " << args.sigma_hat << ", seed " << seed << ")\n";
    return kOk;
}

struct FitZipfArgs {
    fs::path tables;
    fs::path out;
    int slice = std::numeric_limits<int>::min();  // default: first slice
    std::string family = "all";
    std::uint32_t k_min = 1;
    std::uint32_t k_max = 0;
    bool tail_only = false;  // restrict to k >= 10 to de-weight the head
};

int cmd_fitzipf(const FitZipfArgs& args, Manifest& manifest) {
    const RankedCorpus corpus = load_corpus_dir(args.tables);
    manifest.inputs.push_back(args.tables);
    const RankedSlice* slice = args.slice == std::numeric_limits<int>::min()
                                   ? &corpus.slices.front()
                                   : corpus.find_slice(args.slice);
    if (!slice) throw DataError("slice " + std::to_string(args.slice) + " not found");

    ZipfFitOptions options;
    options.k_min = args.tail_only ? std::max(args.k_min, 10u) : args.k_min;
    options.k_max = args.k_max;

    std::vector<ZipfModel> families;
    if (args.family == "all") {
        families = {ZipfModel::PureZipf, ZipfModel::ExpCutoff, ZipfModel::FiniteSize,
                    ZipfModel::FiniteSizeExpCutoff, ZipfModel::DoubleZipf};
    } else {
        families = {model_from_id(args.family)};
    }

    fs::create_directories(args.out);
    json reports = json::array();
    for (const ZipfModel family : families) {
        const ZipfModelFit fit = fit_zipf_model(family, *slice, options);
        json report;
        report["family"] = model_id(family);
        report["params"] = {{"a", fit.model.spec.a},
                            {"b", fit.model.spec.b},
                            {"alpha", fit.model.spec.alpha},
                            {"k_c", fit.model.spec.k_c},
                            {"n_bar", fit.model.spec.n_bar}};
        report["normalization"] = fit.model.normalization;
        report["chi2"] = fit.chi2;
        report["dof"] = fit.dof;
        report["p_value"] = pvalue_to_json(fit.p_value);
        report["statistic"] = fit.statistic;
        reports.push_back(report);

        std::string csv = "k,log10_ratio\n";
        for (const auto& [k, ratio] : model_ratio_curve(fit, *slice, options)) {
            csv += std::to_string(k) + "," + format_number(ratio) + "\n";
        }
        write_output(manifest, args.out / ("ratio_" + std::string(model_id(family)) + ".csv"),
                     csv);
        std::printf("%s: chi2=%.6g dof=%zu\n", model_id(family), fit.chi2, fit.dof);
    }
    write_output(manifest, args.out / "zipf_fits.json", reports.dump(2) + "\n");
    return kOk;
}

struct OverlapArgs {
    fs::path reference;
    fs::path other;
    fs::path out;
    std::size_t top_n = 20;
    std::string translation;
    std::string stoplist_reference;
    std::string stoplist_other;
    std::string format = "csv";
};

int cmd_overlap(const OverlapArgs& args, Manifest& manifest) {
    const RankedCorpus reference = load_corpus_dir(args.reference);
    const RankedCorpus other = load_corpus_dir(args.other);
    manifest.inputs.push_back(args.reference);
    manifest.inputs.push_back(args.other);

    std::optional<TranslationMap> mapping;
    if (!args.translation.empty()) {
        std::size_t warnings = 0;
        mapping = load_translation_map(args.translation, &warnings);
        manifest.inputs.emplace_back(args.translation);
        if (warnings > 0) {
            std::cerr << "warning: " << warnings
                      << " duplicate translation sources (first entry wins)\n";
        }
    }
    std::vector<std::string> stop_ref, stop_other;
    if (!args.stoplist_reference.empty()) {
        stop_ref = load_token_list(args.stoplist_reference);
        manifest.inputs.emplace_back(args.stoplist_reference);
    }
    if (!args.stoplist_other.empty()) {
        stop_other = load_token_list(args.stoplist_other);
        manifest.inputs.emplace_back(args.stoplist_other);
    }

    std::vector<std::pair<int, double>> values;
    for (const auto& slice : other.slices) {
        const RankedSlice* ref_slice = reference.find_slice(slice.slice);
        if (!ref_slice) continue;
        const auto ref_top = stop_ref.empty()
                                 ? top_k(reference, *ref_slice, args.top_n)
                                 : top_k_filtered(reference, *ref_slice, args.top_n, stop_ref);
        const auto other_top = stop_other.empty()
                                   ? top_k(other, slice, args.top_n)
                                   : top_k_filtered(other, slice, args.top_n, stop_other);
        const double value = mapping ? overlap(ref_top, other_top, *mapping)
                                     : overlap(ref_top, other_top);
        values.emplace_back(slice.slice, value);
    }
    if (values.empty()) throw DataError("no common slices between the two table sets");

    fs::create_directories(args.out);
    if (args.format == "json") {
        json doc = json::array();
        for (const auto& [slice, value] : values) {
            doc.push_back({{"slice", slice}, {"overlap", value}});
        }
        write_output(manifest, args.out / "overlap.json", doc.dump(2) + "\n");
    } else {
        std::string csv = "slice,overlap\n";
        for (const auto& [slice, value] : values) {
            csv += std::to_string(slice) + "," + format_number(value) + "\n";
        }
        write_output(manifest, args.out / "overlap.csv", csv);
    }
    for (const auto& [slice, value] : values) {
        std::printf("%d %.4f\n", slice, value);
    }
    return kOk;
}

int run(const std::vector<std::string>& args);

int cmd_replay(const fs::path& manifest_path) {
    const json doc = json::parse(read_file(manifest_path));
    const std::vector<std::string> argv = doc.at("argv").get<std::vector<std::string>>();
    std::cerr << "replaying: rankdiv";
    for (const auto& a : argv) std::cerr << ' ' << a;
    std::cerr << "\n";
    const int rc = run(argv);
    if (rc != kOk) return rc;

    for (const auto& output : doc.at("outputs")) {
        const fs::path path = output.at("path").get<std::string>();
        const std::string expected = output.at("fnv1a64").get<std::string>();
        const std::string actual = file_digest(path);
        if (actual != expected) {
            std::cerr << "replay mismatch: " << path << " digest " << actual << " != "
                      << expected << "\n";
            return kDataError;
        }
    }
    std::cout << "replay matched " << doc.at("outputs").size() << " outputs\n";
    return kOk;
}

// ----- argument wiring ------------------------------------------------------

int run(const std::vector<std::string>& args) {
    CLI::App app{"rank diversity toolkit: ranked time series, diversity sigmoids,\n"
                 "flight statistics, a scale-invariant random walker, and\n"
                 "rank-frequency model fits"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand too

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "seed for every random choice (default: drawn and logged)");
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (default: all cores)");
    std::string format = "csv";
    app.add_option("--format", format, "report format for overlap/correlation")
        ->check(CLI::IsMember({"csv", "json"}));

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "stream corpus files into per-slice tables");
    ingest->add_option("inputs", ingest_args.inputs, "corpus files")->required();
    ingest->add_option("--out", ingest_args.out, "output directory")->required();
    ingest->add_option("--input-format", ingest_args.format, "ngram (TSV) or csv")
        ->check(CLI::IsMember({"ngram", "csv"}));
    ingest->add_flag("--strip-pos-tags", ingest_args.strip_pos_tags,
                     "drop _TAG suffixes from tokens");
    ingest->add_flag("--lowercase", ingest_args.lowercase, "lowercase tokens (ASCII)");
    ingest->add_flag("--alphabetic-only", ingest_args.alphabetic_only,
                     "reject tokens with ASCII digits or punctuation");
    ingest->add_option("--min-count", ingest_args.min_count,
                       "drop merged tokens below this per-slice total")
        ->check(CLI::NonNegativeNumber);
    ingest->add_option("--first", ingest_args.first, "first slice to keep");
    ingest->add_option("--last", ingest_args.last, "last slice to keep");
    ingest->add_flag("--strict", ingest_args.strict, "abort on malformed lines");

    TablesArgs rank_args;
    auto* rank = app.add_subcommand("rank", "emit rank tables from frequency tables");
    rank->add_option("--tables", rank_args.tables, "table directory")->required();
    rank->add_option("--out", rank_args.out, "output directory")->required();

    DiversityArgs diversity_args;
    auto* diversity = app.add_subcommand("diversity", "rank diversity curve and sigmoid fit");
    diversity->add_option("--tables", diversity_args.tables, "table directory")->required();
    diversity->add_option("--out", diversity_args.out, "output directory")->required();
    diversity->add_option("--window", diversity_args.window, "slice window FIRST:LAST")
        ->check([](const std::string& text) -> std::string {
            const auto [first, last] = parse_span(text, "--window");
            if (last - first + 1 < 2) return "--window must span at least 2 slices";
            return {};
        });
    diversity->add_option("--k-max", diversity_args.k_max, "rank cutoff (default: table size)");
    diversity->add_option("--delta", diversity_args.delta, "log10 bin width")
        ->check(CLI::PositiveNumber);

    FlightsArgs flights_args;
    auto* flights = app.add_subcommand("flights", "flight histogram, fits, sigma_hat");
    flights->add_option("--tables", flights_args.tables, "table directory")->required();
    flights->add_option("--out", flights_args.out, "output directory")->required();
    flights->add_option("--band", flights_args.band, "initial rank band LO:HI");
    flights->add_option("--binwidth", flights_args.binwidth, "histogram bin width")
        ->check(CLI::PositiveNumber);
    flights->add_option("--k-max", flights_args.k_max, "sigma_hat rank cutoff");

    CorrelationArgs correlation_args;
    auto* correlation = app.add_subcommand("correlation", "averaged flight autocorrelation");
    correlation->add_option("--tables", correlation_args.tables, "table directory")->required();
    correlation->add_option("--out", correlation_args.out, "output directory")->required();
    correlation->add_option("--sample-size", correlation_args.sample_size, "ranks to sample")
        ->check(CLI::PositiveNumber);
    correlation->add_option("--tau-max", correlation_args.tau_max, "largest lag");

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "scale-invariant Gaussian walker");
    simulate->add_option("-n,--items", simulate_args.n_items, "number of items")->required();
    simulate->add_option("-t,--steps", simulate_args.n_steps, "number of emitted slices")
        ->required();
    simulate->add_option("--sigma-hat", simulate_args.sigma_hat, "walk width parameter")
        ->required()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--burn-in", simulate_args.burn_in, "steps discarded up front");
    simulate->add_option("--out", simulate_args.out, "output directory")->required();

    FitZipfArgs fitzipf_args;
    auto* fitzipf = app.add_subcommand("fitzipf", "fit rank-frequency models m1..m5");
    fitzipf->add_option("--tables", fitzipf_args.tables, "table directory")->required();
    fitzipf->add_option("--out", fitzipf_args.out, "output directory")->required();
    fitzipf->add_option("--slice", fitzipf_args.slice, "slice to fit (default: first)");
    fitzipf->add_option("--family", fitzipf_args.family, "m1..m5 or all")
        ->check(CLI::IsMember({"m1", "m2", "m3", "m4", "m5", "all"}));
    fitzipf->add_option("--k-min", fitzipf_args.k_min, "first rank of the fit range")
        ->check(CLI::PositiveNumber);
    fitzipf->add_option("--k-max", fitzipf_args.k_max, "last rank of the fit range");
    fitzipf->add_flag("--tail-only", fitzipf_args.tail_only, "restrict to k >= 10");

    OverlapArgs overlap_args;
    auto* overlap_cmd = app.add_subcommand("overlap", "top-n overlap against a reference");
    overlap_cmd->add_option("--reference", overlap_args.reference, "reference table directory")
        ->required();
    overlap_cmd->add_option("--other", overlap_args.other, "compared table directory")
        ->required();
    overlap_cmd->add_option("--out", overlap_args.out, "output directory")->required();
    overlap_cmd->add_option("-n,--top", overlap_args.top_n, "list length")
        ->check(CLI::PositiveNumber);
    overlap_cmd->add_option("--translation", overlap_args.translation,
                            "two-column TSV source->reference map");
    overlap_cmd->add_option("--stoplist-reference", overlap_args.stoplist_reference,
                            "tokens to drop from the reference lists");
    overlap_cmd->add_option("--stoplist-other", overlap_args.stoplist_other,
                            "tokens to drop from the compared lists");

    fs::path replay_path;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and verify outputs");
    replay->add_option("manifest", replay_path, "manifest.json path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        Manifest manifest;
        manifest.argv = args;
        fs::path out_dir;
        int rc = kOk;
        if (app.got_subcommand(ingest)) {
            manifest.command = "ingest";
            out_dir = ingest_args.out;
            rc = cmd_ingest(ingest_args, manifest);
        } else if (app.got_subcommand(rank)) {
            manifest.command = "rank";
            out_dir = rank_args.out;
            rc = cmd_rank(rank_args, manifest);
        } else if (app.got_subcommand(diversity)) {
            manifest.command = "diversity";
            out_dir = diversity_args.out;
            rc = cmd_diversity(diversity_args, manifest);
        } else if (app.got_subcommand(flights)) {
            manifest.command = "flights";
            out_dir = flights_args.out;
            rc = cmd_flights(flights_args, manifest);
        } else if (app.got_subcommand(correlation)) {
            manifest.command = "correlation";
            out_dir = correlation_args.out;
            correlation_args.format = format;
            manifest.seed = resolve_seed(seed, manifest.argv);
            rc = cmd_correlation(correlation_args, manifest, *manifest.seed);
        } else if (app.got_subcommand(simulate)) {
            manifest.command = "simulate";
            out_dir = simulate_args.out;
            manifest.seed = resolve_seed(seed, manifest.argv);
            rc = cmd_simulate(simulate_args, manifest, *manifest.seed);
        } else if (app.got_subcommand(fitzipf)) {
            manifest.command = "fitzipf";
            out_dir = fitzipf_args.out;
            rc = cmd_fitzipf(fitzipf_args, manifest);
        } else if (app.got_subcommand(overlap_cmd)) {
            manifest.command = "overlap";
            out_dir = overlap_args.out;
            overlap_args.format = format;
            rc = cmd_overlap(overlap_args, manifest);
        } else if (app.got_subcommand(replay)) {
            return cmd_replay(replay_path);
        }
        if (rc == kOk) manifest.write(out_dir);
        return rc;
    } catch (const FitError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const DomainError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}

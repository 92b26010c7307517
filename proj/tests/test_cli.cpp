#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end runs of the built binary against the bundled fixture corpus.
// Command outputs are checked against direct library calls on the same data.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "rankdiv/diversity.hpp"
#include "rankdiv/dynamics.hpp"
#include "rankdiv/ingest.hpp"
#include "rankdiv/io.hpp"
#include "rankdiv/rank_table.hpp"
#include "rankdiv/zipf_models.hpp"

using namespace rankdiv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = RANKDIV_TEST_DATA;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("rankdiv_cli_out_" + std::to_string(counter));
    const fs::path err = fs::temp_directory_path() / ("rankdiv_cli_err_" + std::to_string(counter));
    ++counter;
    const std::string command =
        std::string(RANKDIV_BIN) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out);
    result.err = read_file(err);
    fs::remove(out);
    fs::remove(err);
    return result;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rankdiv_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

const std::string kPolicyFlags = " --strip-pos-tags --lowercase --alphabetic-only";

fs::path ingested_tables() {
    static const fs::path tables = [] {
        const fs::path dir = scratch("tables");
        const auto r = run_cli("ingest " + (kData / "fixture_1grams.tsv").string() +
                               " --out " + dir.string() + kPolicyFlags);
        REQUIRE(r.exit_code == 0);
        return dir;
    }();
    return tables;
}

}  // namespace

TEST_CASE("--help exits 0 on every command") {
    for (const std::string cmd :
         {"", "ingest", "rank", "diversity", "flights", "correlation", "simulate", "fitzipf",
          "overlap", "replay"}) {
        const auto r = run_cli(cmd + " --help");
        INFO(cmd);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
}

TEST_CASE("ingest writes tables matching the library path") {
    const fs::path tables = ingested_tables();
    CHECK(fs::exists(tables / "2000.tsv"));
    CHECK(fs::exists(tables / "2002.tsv"));
    CHECK(fs::exists(tables / "manifest.json"));

    IngestOptions options;
    options.policy = {true, true, true, 0.0};
    const IngestResult direct =
        ingest_files({kData / "fixture_1grams.tsv"}, options);
    for (const auto& table : direct.tables) {
        CHECK(read_file(tables / (std::to_string(table.slice) + ".tsv")) == to_tsv(table));
    }
    // "The" folded into "the", the tagged time variant into "time".
    const auto t2000 = frequency_table_from_tsv(read_file(tables / "2000.tsv"), 2000);
    CHECK(t2000.entries.at("the") == 107.0);
    CHECK(t2000.entries.at("time") == 35.0);
}

TEST_CASE("corrupt lines: skipped by default, fatal under --strict") {
    const fs::path dir = scratch("corrupt");
    const auto lax = run_cli("ingest " + (kData / "fixture_corrupt.tsv").string() + " --out " +
                             dir.string());
    CHECK(lax.exit_code == 0);
    CHECK(lax.out.find("malformed skipped: 1") != std::string::npos);

    const fs::path dir2 = scratch("corrupt_strict");
    const auto strict = run_cli("ingest " + (kData / "fixture_corrupt.tsv").string() +
                                " --out " + dir2.string() + " --strict");
    CHECK(strict.exit_code == 2);
    CHECK_FALSE(fs::exists(dir2));
}

TEST_CASE("rank emits rank tables; 'the' holds rank 1 in every slice") {
    const fs::path out = scratch("ranked");
    const auto r = run_cli("rank --tables " + ingested_tables().string() + " --out " + out.string());
    REQUIRE(r.exit_code == 0);
    for (const int slice : {2000, 2001, 2002}) {
        const std::string tsv = read_file(out / (std::to_string(slice) + ".tsv"));
        CHECK(tsv.substr(0, tsv.find('\n')).starts_with("1\tthe\t"));
    }
}

TEST_CASE("diversity outputs equal direct library calls") {
    const fs::path out = scratch("div");
    const auto r = run_cli("diversity --tables " + ingested_tables().string() + " --out " +
                           out.string() + " --delta 0.1");
    REQUIRE(r.exit_code == 0);

    const RankedCorpus corpus = load_corpus_dir(ingested_tables());
    const Rank k_max = static_cast<Rank>(corpus.min_slice_size());
    const DiversityCurve curve = log_window(rank_diversity(corpus, k_max), 0.1);
    const SigmoidFit fit = fit_sigmoid(curve);

    CHECK(read_file(out / "diversity_raw.csv") == raw_curve_csv(curve));
    CHECK(read_file(out / "diversity_windowed.csv") == windowed_curve_csv(curve, fit));
    const json report = json::parse(read_file(out / "fit.json"));
    CHECK(report.at("mu").get<double>() == doctest::Approx(fit.mu).epsilon(1e-12));
    CHECK(report.at("sigma").get<double>() == doctest::Approx(fit.sigma).epsilon(1e-12));
    CHECK(report.at("T").get<std::size_t>() == 3);
}

TEST_CASE("diversity usage errors") {
    const auto degenerate = run_cli("diversity --tables x --out y --window 5:5");
    CHECK(degenerate.exit_code == 1);
    const auto zero_delta = run_cli("diversity --tables x --out y --delta 0");
    CHECK(zero_delta.exit_code == 1);

    const fs::path out = scratch("div_missing");
    const auto missing = run_cli("diversity --tables /no/such/dir --out " + out.string());
    CHECK(missing.exit_code == 2);
    CHECK_FALSE(fs::exists(out));  // no partial outputs
}

TEST_CASE("flights and correlation on the fixture corpus") {
    const fs::path out = scratch("flights");
    const auto r = run_cli("flights --tables " + ingested_tables().string() + " --out " +
                           out.string() + " --band 1:4 --binwidth 0.05");
    REQUIRE(r.exit_code == 0);
    const json fits = json::parse(read_file(out / "flight_fits.json"));
    const RankedCorpus corpus = load_corpus_dir(ingested_tables());
    const SigmaHatResult sigma = sigma_hat(corpus, static_cast<Rank>(corpus.min_slice_size()));
    CHECK(fits.at("sigma_hat").get<double>() == doctest::Approx(sigma.value).epsilon(1e-12));
    CHECK(fits.at("sample_count").get<std::size_t>() == 8);

    // 8 tokens, 3 slices: nobody has more flights than tau_max needs.
    const auto corr = run_cli("correlation --tables " + ingested_tables().string() +
                              " --out " + scratch("corr").string() +
                              " --sample-size 50 --tau-max 10 --seed 1");
    CHECK(corr.exit_code == 2);
    CHECK(corr.err.find("data error") != std::string::npos);
}

TEST_CASE("simulate is deterministic and replay verifies digests") {
    const fs::path a = scratch("sim_a");
    const fs::path b = scratch("sim_b");
    const std::string flags = " -n 300 -t 20 --sigma-hat 0.0575 --seed 42 --out ";
    REQUIRE(run_cli("simulate" + flags + a.string()).exit_code == 0);
    REQUIRE(run_cli("simulate" + flags + b.string()).exit_code == 0);
    for (int t = 0; t < 20; ++t) {
        const std::string name = std::to_string(t) + ".tsv";
        CHECK(read_file(a / name) == read_file(b / name));
    }

    const auto replay = run_cli("replay " + (a / "manifest.json").string());
    CHECK(replay.exit_code == 0);
    CHECK(replay.out.find("replay matched") != std::string::npos);

    // Simulated tables feed the diversity pipeline like any corpus.
    const fs::path div = scratch("sim_div");
    const auto fitted =
        run_cli("diversity --tables " + a.string() + " --out " + div.string());
    REQUIRE(fitted.exit_code == 0);
    const json fit = json::parse(read_file(div / "fit.json"));
    CHECK(fit.contains("mu"));
    CHECK(fit.contains("sigma"));
    CHECK(fit.contains("mse"));
    CHECK(fit.at("T").get<int>() == 20);

    // A manifest whose recorded digest cannot be reproduced fails the replay.
    json manifest = json::parse(read_file(a / "manifest.json"));
    manifest["outputs"][0]["fnv1a64"] = "0000000000000000";
    atomic_write_file(a / "tampered_manifest.json", manifest.dump(2) + "\n");
    const auto tampered = run_cli("replay " + (a / "tampered_manifest.json").string());
    CHECK(tampered.exit_code == 2);
    CHECK(tampered.err.find("replay mismatch") != std::string::npos);
}

TEST_CASE("an omitted seed is drawn and recorded in the manifest") {
    const fs::path out = scratch("sim_auto");
    const auto r = run_cli("simulate -n 50 -t 5 --sigma-hat 0.1 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("seed not given") != std::string::npos);
    const json manifest = json::parse(read_file(out / "manifest.json"));
    CHECK(manifest.contains("seed"));
    // The recorded argv replays with the resolved seed.
    const auto replay = run_cli("replay " + (out / "manifest.json").string());
    CHECK(replay.exit_code == 0);
}

TEST_CASE("fitzipf report matches the library fit") {
    const fs::path out = scratch("zipf");
    const auto r = run_cli("fitzipf --tables " + ingested_tables().string() + " --out " +
                           out.string() + " --family m1 --slice 2000");
    REQUIRE(r.exit_code == 0);
    const json reports = json::parse(read_file(out / "zipf_fits.json"));
    REQUIRE(reports.size() == 1);

    const RankedCorpus corpus = load_corpus_dir(ingested_tables());
    const ZipfModelFit fit = fit_zipf_model(ZipfModel::PureZipf, *corpus.find_slice(2000));
    CHECK(reports[0].at("chi2").get<double>() == doctest::Approx(fit.chi2).epsilon(1e-9));
    CHECK(reports[0].at("params").at("a").get<double>() ==
          doctest::Approx(fit.model.spec.a).epsilon(1e-9));
    CHECK(reports[0].at("statistic") == "pearson");
    CHECK(fs::exists(out / "ratio_m1.csv"));
}

TEST_CASE("overlap: function words near 1, content words via stoplists") {
    const fs::path fr = scratch("fr_tables");
    REQUIRE(run_cli("ingest " + (kData / "fixture_french.tsv").string() + " --out " +
                    fr.string() + kPolicyFlags)
                .exit_code == 0);

    const fs::path out = scratch("overlap");
    const auto r = run_cli("overlap --reference " + ingested_tables().string() + " --other " +
                           fr.string() + " --out " + out.string() + " -n 4 --translation " +
                           (kData / "fixture_map.tsv").string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = read_file(out / "overlap.csv");
    CHECK(csv.starts_with("slice,overlap\n2000,1\n"));

    // Stoplists shift the comparison to content words.
    const fs::path out2 = scratch("overlap_content");
    const auto r2 = run_cli(
        "overlap --reference " + ingested_tables().string() + " --other " + fr.string() +
        " --out " + out2.string() + " -n 3 --translation " + (kData / "fixture_map.tsv").string() +
        " --stoplist-reference " + (kData / "fixture_stoplist_en.txt").string() +
        " --stoplist-other " + (kData / "fixture_stoplist_fr.txt").string() + " --format json");
    REQUIRE(r2.exit_code == 0);
    const json doc = json::parse(read_file(out2 / "overlap.json"));
    REQUIRE(doc.size() == 3);
    for (const auto& row : doc) {
        CHECK(row.at("overlap").get<double>() == 1.0);  // same content words by design
    }
}

TEST_CASE("generic CSV ingestion feeds the same pipelines") {
    const fs::path tables = scratch("chess_tables");
    const auto r = run_cli("ingest " + (kData / "fixture_chess.csv").string() + " --out " +
                           tables.string() + " --input-format csv");
    REQUIRE(r.exit_code == 0);
    const RankedCorpus corpus = load_corpus_dir(tables);
    REQUIRE(corpus.slice_count() == 3);
    CHECK(corpus.vocab.token(corpus.slices[0].ids[0]) == "carlsen");
    CHECK(corpus.slices[0].counts[0] == 2870.5);
}

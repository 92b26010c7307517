#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "rankdiv/errors.hpp"
#include "rankdiv/ingest.hpp"
#include "rankdiv/io.hpp"

using namespace rankdiv;
namespace fs = std::filesystem;

namespace {

TableBuilder builder_for(TokenPolicy policy = {}, SliceRange range = {}) {
    return TableBuilder(std::move(policy), range);
}

std::vector<FrequencyTable> build(const std::vector<FrequencyRecord>& records,
                                  TokenPolicy policy = {}, SliceRange range = {}) {
    TableBuilder builder = builder_for(std::move(policy), range);
    for (const auto& r : records) builder.add(r);
    return std::move(builder).finalize();
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rankdiv_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("parse_ngram_line maps fields") {
    auto rec = parse_ngram_line("the\t2000\t53\t13");
    REQUIRE(rec.has_value());
    CHECK(rec->token == "the");
    CHECK(rec->slice == 2000);
    CHECK(rec->count == 53.0);

    rec = parse_ngram_line("word_NOUN\t1900\t7\t2");
    REQUIRE(rec.has_value());
    CHECK(rec->token == "word_NOUN");  // tags survive the parse stage
    CHECK(rec->slice == 1900);
    CHECK(rec->count == 7.0);

    // Three fields suffice; the volume column is optional.
    CHECK(parse_ngram_line("a\t1850\t1").has_value());
}

TEST_CASE("parse_ngram_line rejects malformed lines") {
    std::string error;
    CHECK_FALSE(parse_ngram_line("bad\tline", &error).has_value());
    CHECK_FALSE(error.empty());
    CHECK_FALSE(parse_ngram_line("", nullptr).has_value());
    CHECK_FALSE(parse_ngram_line("a\tx\t3", nullptr).has_value());
    CHECK_FALSE(parse_ngram_line("a\t1900\t-3", nullptr).has_value());
    CHECK_FALSE(parse_ngram_line("a\t1900\t0", nullptr).has_value());
    CHECK_FALSE(parse_ngram_line("a\t1900\t3.5", nullptr).has_value());
}

TEST_CASE("parse_csv_record") {
    const auto rec = parse_csv_record("carlsen,5,2870.5");
    REQUIRE(rec.has_value());
    CHECK(rec->token == "carlsen");
    CHECK(rec->slice == 5);
    CHECK(rec->count == 2870.5);

    CHECK_FALSE(parse_csv_record("only,two", nullptr).has_value());
    CHECK_FALSE(parse_csv_record("x,1,-2", nullptr).has_value());
}

TEST_CASE("normalize_token applies the policy stages in order") {
    CHECK(normalize_token("The", {.lowercase = true}) == "the");
    CHECK(normalize_token("word_NOUN", {.strip_pos_tags = true}) == "word");
    CHECK_FALSE(normalize_token("c3po", {.alphabetic_only = true}).has_value());
    CHECK(normalize_token("Time", {}) == "Time");  // empty policy is the identity
    // A token that is only a tag is rejected.
    CHECK_FALSE(normalize_token("_NOUN", {.strip_pos_tags = true}).has_value());
    // Strip precedes lowercase, so the tag is still uppercase when matched.
    CHECK(normalize_token("Run_VERB",
                          {.strip_pos_tags = true, .lowercase = true}) == "run");
}

TEST_CASE("normalize_token is idempotent") {
    std::mt19937_64 gen(42);
    const std::string alphabet = "abcXYZ_09";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(1, 12);
    for (int trial = 0; trial < 500; ++trial) {
        std::string token;
        for (int i = 0, n = len(gen); i < n; ++i) token.push_back(alphabet[pick(gen)]);
        for (const TokenPolicy policy :
             {TokenPolicy{.strip_pos_tags = true, .lowercase = true},
              TokenPolicy{.strip_pos_tags = true, .alphabetic_only = true},
              TokenPolicy{.lowercase = true, .alphabetic_only = true},
              TokenPolicy{.strip_pos_tags = true, .lowercase = true, .alphabetic_only = true}}) {
            const auto once = normalize_token(token, policy);
            if (!once) continue;
            const auto twice = normalize_token(*once, policy);
            REQUIRE(twice.has_value());
            CHECK(*twice == *once);
        }
    }
}

TEST_CASE("build_tables merges tokens identical after normalization") {
    const auto tables = build({{"The", 2000, 3}, {"the", 2000, 5}}, {.lowercase = true});
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].slice == 2000);
    CHECK(tables[0].entries.at("the") == 8.0);
    CHECK(tables[0].total == 8.0);
}

TEST_CASE("build_tables: empty stream, range filter, min_count") {
    CHECK(build({}).empty());

    const auto ranged = build({{"a", 1999, 1}, {"b", 2000, 2}, {"c", 2001, 3}}, {},
                              {.first = 2000, .last = 2000});
    REQUIRE(ranged.size() == 1);
    CHECK(ranged[0].slice == 2000);

    // min_count prunes merged totals, not individual records.
    const auto pruned = build({{"x", 1, 3}, {"x", 1, 3}, {"y", 1, 4}},
                              {.min_count = 5});
    REQUIRE(pruned.size() == 1);
    CHECK(pruned[0].entries.count("x") == 1);  // 3 + 3 = 6 >= 5
    CHECK(pruned[0].entries.count("y") == 0);
}

TEST_CASE("build_tables agrees with an in-memory group-by oracle") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> slice(2000, 2002);
    std::uniform_int_distribution<int> tok(0, 25);
    std::uniform_int_distribution<int> count(1, 9);

    std::vector<FrequencyRecord> records;
    std::map<std::pair<int, std::string>, double> oracle;
    for (int i = 0; i < 1000; ++i) {
        FrequencyRecord r{std::string(1, static_cast<char>('a' + tok(gen))), slice(gen),
                          static_cast<double>(count(gen))};
        oracle[{r.slice, r.token}] += r.count;
        records.push_back(std::move(r));
    }

    const auto tables = build(records);
    std::size_t entries = 0;
    for (const auto& table : tables) {
        double total = 0.0;
        for (const auto& [token, c] : table.entries) {
            CHECK(oracle.at({table.slice, token}) == c);
            total += c;
            ++entries;
        }
        CHECK(table.total == total);
    }
    CHECK(entries == oracle.size());
}

TEST_CASE("order independence: permuting the stream yields identical tables") {
    std::vector<FrequencyRecord> records;
    for (int i = 0; i < 200; ++i) {
        records.push_back({std::string(1, static_cast<char>('a' + i % 13)), 1900 + i % 3,
                           static_cast<double>(1 + i % 7)});
    }
    const auto baseline = build(records, {.lowercase = true});
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(records.begin(), records.end(), gen);
        const auto shuffled = build(records, {.lowercase = true});
        REQUIRE(shuffled.size() == baseline.size());
        for (std::size_t t = 0; t < baseline.size(); ++t) {
            CHECK(shuffled[t].slice == baseline[t].slice);
            CHECK(shuffled[t].entries == baseline[t].entries);
        }
    }
}

TEST_CASE("conservation: kept + dropped count mass equals the input mass") {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> tok(0, 40);
    std::vector<FrequencyRecord> records;
    double input_mass = 0.0;
    for (int i = 0; i < 500; ++i) {
        // Tokens like "q3" get rejected by alphabetic_only.
        std::string token(1, static_cast<char>('a' + tok(gen) % 26));
        if (tok(gen) > 30) token += '3';
        const double c = 1.0 + i % 5;
        input_mass += c;
        records.push_back({token, 2000 + i % 2, c});
    }
    TableBuilder builder = builder_for({.alphabetic_only = true});
    for (const auto& r : records) builder.add(r);
    const auto tables = std::move(builder).finalize();
    const auto& stats = builder.stats();
    CHECK(stats.kept_count_mass + stats.dropped_count_mass == input_mass);
    double table_mass = 0.0;
    for (const auto& t : tables) table_mass += t.total;
    CHECK(table_mass == stats.kept_count_mass);
}

TEST_CASE("TSV persistence round-trips bit-exactly") {
    FrequencyTable table;
    table.slice = 1987;
    table.entries = {{"the", 100}, {"of", 50}, {"and", 50}, {"zebra", 1}};
    for (const auto& [_, c] : table.entries) table.total += c;

    const std::string tsv = to_tsv(table);
    // Descending count, ties ascending token.
    CHECK(tsv == "the\t100\nand\t50\nof\t50\nzebra\t1\n");

    const FrequencyTable back = frequency_table_from_tsv(tsv, table.slice);
    CHECK(back.entries == table.entries);
    CHECK(back.total == table.total);
    CHECK(to_tsv(back) == tsv);

    // Decimal scores keep their shortest round-trip form.
    FrequencyTable scored;
    scored.slice = 1;
    scored.entries = {{"a", 0.1}, {"b", 2870.5}};
    const std::string stsv = to_tsv(scored);
    const FrequencyTable sback = frequency_table_from_tsv(stsv, 1);
    CHECK(sback.entries.at("a") == 0.1);
    CHECK(to_tsv(sback) == stsv);
}

TEST_CASE("ingest_files: parallel and serial agree; strict mode throws") {
    const fs::path dir = temp_dir("ingest");
    {
        std::ofstream a(dir / "a.tsv");
        a << "The\t2000\t3\t1\nthe\t2000\t5\t2\nword_NOUN\t2001\t7\t1\n";
        std::ofstream b(dir / "b.tsv");
        b << "the\t2001\t2\t1\nbroken line without tabs\nx9\t2000\t4\t1\n";
    }
    IngestOptions options;
    options.policy = {.strip_pos_tags = true, .lowercase = true, .alphabetic_only = true};

    const std::vector<fs::path> paths = {dir / "a.tsv", dir / "b.tsv"};
    const IngestResult serial = ingest_files_serial(paths, options);
    const IngestResult parallel = ingest_files(paths, options);

    REQUIRE(serial.tables.size() == 2);
    CHECK(serial.stats.malformed_lines == 1);
    CHECK(serial.stats.rejected_tokens == 1);  // "x9"
    CHECK(serial.tables[0].entries.at("the") == 8.0);
    CHECK(serial.tables[1].entries.at("word") == 7.0);
    CHECK(serial.tables[1].entries.at("the") == 2.0);

    REQUIRE(parallel.tables.size() == serial.tables.size());
    for (std::size_t i = 0; i < serial.tables.size(); ++i) {
        CHECK(parallel.tables[i].slice == serial.tables[i].slice);
        CHECK(parallel.tables[i].entries == serial.tables[i].entries);
    }
    CHECK(parallel.stats.malformed_lines == serial.stats.malformed_lines);

    IngestOptions strict = options;
    strict.strict = true;
    CHECK_THROWS_AS(ingest_files(paths, strict), DataError);
    CHECK_THROWS_AS(ingest_files_serial(paths, strict), DataError);

    CHECK_THROWS_AS(ingest_files_serial({dir / "missing.tsv"}, options), DataError);
    fs::remove_all(dir);
}

TEST_CASE("generic CSV ingestion validates the header") {
    const fs::path dir = temp_dir("csv");
    {
        std::ofstream f(dir / "chess.csv");
        f << "id,slice,score\ncarlsen,0,2870.5\nanand,0,2780\ncarlsen,1,2860\n";
    }
    IngestOptions options;
    options.format = CorpusFormat::GenericCsv;
    const IngestResult result = ingest_files_serial({dir / "chess.csv"}, options);
    REQUIRE(result.tables.size() == 2);
    CHECK(result.tables[0].entries.at("carlsen") == 2870.5);

    {
        std::ofstream f(dir / "bad.csv");
        f << "wrong,header,line\nx,0,1\n";
    }
    CHECK_THROWS_AS(ingest_files_serial({dir / "bad.csv"}, options), DataError);
    fs::remove_all(dir);
}

TEST_CASE("write_tables produces <slice>.tsv files") {
    const fs::path dir = temp_dir("write");
    const auto tables = build({{"b", 3, 2}, {"a", 3, 5}, {"c", 4, 1}});
    const auto written = write_tables(tables, dir / "out");
    REQUIRE(written.size() == 2);
    CHECK(written[0].filename() == "3.tsv");
    CHECK(read_file(written[0]) == "a\t5\nb\t2\n");
    fs::remove_all(dir);
}

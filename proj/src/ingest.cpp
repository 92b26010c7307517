#include "rankdiv/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>

#include "rankdiv/errors.hpp"
#include "rankdiv/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rankdiv {

namespace {

bool parse_int(std::string_view field, int& out) {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

bool parse_count(std::string_view field, std::uint64_t& out) {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

bool parse_score(std::string_view field, double& out) {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

std::optional<FrequencyRecord> fail(std::string* error, std::string message) {
    if (error) *error = std::move(message);
    return std::nullopt;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }

// A POS tag suffix is a trailing run of ASCII uppercase preceded by '_'.
// Returns the token length with one tag removed, or npos if none.
std::size_t tag_suffix_start(std::string_view token) {
    std::size_t i = token.size();
    while (i > 0 && is_ascii_upper(token[i - 1])) --i;
    if (i == token.size() || i == 0) return std::string_view::npos;
    if (token[i - 1] != '_') return std::string_view::npos;
    return i - 1;
}

}  // namespace

std::optional<FrequencyRecord> parse_ngram_line(std::string_view line, std::string* error) {
    line = strip_cr(line);
    std::array<std::string_view, 3> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            if (i < 2) return fail(error, "expected at least 3 tab-separated fields");
            fields[i] = line.substr(start);
            start = line.size();
            break;
        }
        fields[i] = line.substr(start, tab - start);
        start = tab + 1;
    }

    if (fields[0].empty()) return fail(error, "empty token field");
    int slice = 0;
    if (!parse_int(fields[1], slice)) return fail(error, "slice field is not an integer");
    std::uint64_t count = 0;
    if (!parse_count(fields[2], count)) return fail(error, "count field is not a non-negative integer");
    if (count == 0) return fail(error, "count must be >= 1");

    return FrequencyRecord{std::string(fields[0]), slice, static_cast<double>(count)};
}

std::optional<FrequencyRecord> parse_csv_record(std::string_view line, std::string* error) {
    line = strip_cr(line);
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) return fail(error, "expected 3 comma-separated fields");
    const std::string_view id = line.substr(0, c1);
    const std::string_view slice_field = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string_view score_field = line.substr(c2 + 1);

    if (id.empty()) return fail(error, "empty id field");
    int slice = 0;
    if (!parse_int(slice_field, slice)) return fail(error, "slice field is not an integer");
    double score = 0.0;
    if (!parse_score(score_field, score) || !(score >= 0.0)) {
        return fail(error, "score field is not a non-negative decimal");
    }

    return FrequencyRecord{std::string(id), slice, score};
}

std::optional<std::string> normalize_token(std::string_view token, const TokenPolicy& policy) {
    std::string_view view = token;
    if (policy.strip_pos_tags) {
        // Strip repeatedly so the result is a fixpoint (idempotence).
        for (std::size_t cut = tag_suffix_start(view); cut != std::string_view::npos;
             cut = tag_suffix_start(view)) {
            view = view.substr(0, cut);
        }
    }
    if (view.empty()) return std::nullopt;

    std::string result(view);
    if (policy.lowercase) {
        for (char& c : result) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
    }
    if (policy.alphabetic_only) {
        for (const char c : result) {
            // Bytes >= 0x80 (UTF-8 continuation/lead) pass through; only
            // ASCII non-letters disqualify a token.
            const auto u = static_cast<unsigned char>(c);
            if (u < 0x80 && !std::isalpha(u)) return std::nullopt;
        }
    }
    return result;
}

void IngestStats::merge(const IngestStats& other) {
    lines_read += other.lines_read;
    records_parsed += other.records_parsed;
    malformed_lines += other.malformed_lines;
    rejected_tokens += other.rejected_tokens;
    out_of_range += other.out_of_range;
    below_min_count += other.below_min_count;
    kept_count_mass += other.kept_count_mass;
    dropped_count_mass += other.dropped_count_mass;
}

TableBuilder::TableBuilder(TokenPolicy policy, SliceRange range)
    : policy_(std::move(policy)), range_(range) {
    if (range_.empty()) throw DomainError("TableBuilder: empty slice range");
}

void TableBuilder::add(const FrequencyRecord& record) {
    ++stats_.records_parsed;
    if (!range_.contains(record.slice)) {
        ++stats_.out_of_range;
        stats_.dropped_count_mass += record.count;
        return;
    }
    const auto token = normalize_token(record.token, policy_);
    if (!token) {
        ++stats_.rejected_tokens;
        stats_.dropped_count_mass += record.count;
        return;
    }
    slices_[record.slice][*token] += record.count;
}

void TableBuilder::merge(TableBuilder&& other) {
    for (auto& [slice, entries] : other.slices_) {
        auto& target = slices_[slice];
        if (target.empty()) {
            target = std::move(entries);
        } else {
            for (auto& [token, count] : entries) target[token] += count;
        }
    }
    stats_.merge(other.stats_);
}

std::vector<FrequencyTable> TableBuilder::finalize() && {
    std::vector<FrequencyTable> tables;
    tables.reserve(slices_.size());
    for (auto& [slice, entries] : slices_) {
        FrequencyTable table;
        table.slice = slice;
        for (auto it = entries.begin(); it != entries.end();) {
            if (it->second < policy_.min_count) {
                ++stats_.below_min_count;
                stats_.dropped_count_mass += it->second;
                it = entries.erase(it);
            } else {
                table.total += it->second;
                ++it;
            }
        }
        if (entries.empty()) continue;
        table.entries = std::move(entries);
        stats_.kept_count_mass += table.total;
        tables.push_back(std::move(table));
    }
    return tables;
}

namespace {

void ingest_one_file(const std::filesystem::path& path, const IngestOptions& options,
                     TableBuilder& builder) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file", path.string(), 0);

    std::string line;
    std::size_t line_no = 0;
    bool expect_header = options.format == CorpusFormat::GenericCsv;
    while (std::getline(in, line)) {
        ++line_no;
        ++builder.stats().lines_read;
        if (expect_header) {
            expect_header = false;
            std::string_view header = strip_cr(line);
            if (header != "id,slice,score") {
                throw DataError("expected header 'id,slice,score', got '" + std::string(header) + "'",
                                path.string(), line_no);
            }
            continue;
        }
        if (line.empty()) continue;

        std::string error;
        const auto record = options.format == CorpusFormat::NgramTsv
                                ? parse_ngram_line(line, &error)
                                : parse_csv_record(line, &error);
        if (!record) {
            if (options.strict) throw DataError(error, path.string(), line_no);
            ++builder.stats().malformed_lines;
            continue;
        }
        builder.add(*record);
    }
    if (in.bad()) throw DataError("read failed", path.string(), line_no);
}

}  // namespace

IngestResult ingest_files_serial(const std::vector<std::filesystem::path>& paths,
                                 const IngestOptions& options) {
    TableBuilder builder(options.policy, options.range);
    for (const auto& path : paths) ingest_one_file(path, options, builder);
    IngestResult result;
    result.tables = std::move(builder).finalize();
    result.stats = builder.stats();
    return result;
}

IngestResult ingest_files(const std::vector<std::filesystem::path>& paths,
                          const IngestOptions& options) {
    const int n = static_cast<int>(paths.size());
    // One builder per thread, files assigned statically: the merge order is
    // fixed by the thread count, not by scheduling luck.
    int n_threads = 1;
#ifdef _OPENMP
    n_threads = std::max(1, std::min(omp_get_max_threads(), n));
#endif
    std::vector<TableBuilder> partial;
    partial.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) partial.emplace_back(options.policy, options.range);
    std::exception_ptr failure;

#pragma omp parallel for schedule(static) num_threads(n_threads)
    for (int i = 0; i < n; ++i) {
        int thread = 0;
#ifdef _OPENMP
        thread = omp_get_thread_num();
#endif
        try {
            ingest_one_file(paths[static_cast<std::size_t>(i)], options,
                            partial[static_cast<std::size_t>(thread)]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    TableBuilder merged = std::move(partial.front());
    for (std::size_t i = 1; i < partial.size(); ++i) merged.merge(std::move(partial[i]));
    IngestResult result;
    result.tables = std::move(merged).finalize();
    result.stats = merged.stats();
    return result;
}

std::string to_tsv(const FrequencyTable& table) {
    std::vector<std::pair<std::string_view, double>> rows;
    rows.reserve(table.entries.size());
    for (const auto& [token, count] : table.entries) rows.emplace_back(token, count);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::string out;
    for (const auto& [token, count] : rows) {
        out.append(token);
        out.push_back('\t');
        out.append(format_number(count));
        out.push_back('\n');
    }
    return out;
}

FrequencyTable frequency_table_from_tsv(std::string_view content, int slice,
                                        std::string_view source_name) {
    FrequencyTable table;
    table.slice = slice;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        const std::string_view line = strip_cr(content.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0) {
            throw DataError("expected 'token TAB count'", std::string(source_name), line_no);
        }
        double count = 0.0;
        if (!parse_score(line.substr(tab + 1), count)) {
            throw DataError("count is not a decimal number", std::string(source_name), line_no);
        }
        const auto [it, inserted] = table.entries.emplace(line.substr(0, tab), count);
        if (!inserted) {
            throw DataError("duplicate token '" + it->first + "'", std::string(source_name), line_no);
        }
        table.total += count;
    }
    return table;
}

std::vector<std::filesystem::path> write_tables(const std::vector<FrequencyTable>& tables,
                                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    written.reserve(tables.size());
    for (const auto& table : tables) {
        const auto path = out_dir / (std::to_string(table.slice) + ".tsv");
        atomic_write_file(path, to_tsv(table));
        written.push_back(path);
    }
    return written;
}

}  // namespace rankdiv

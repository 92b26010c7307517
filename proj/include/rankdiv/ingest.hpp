#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rankdiv {

/// One raw occurrence record: a token seen `count` times in time slice
/// `slice` (a year for the 1-gram corpus, any integer ordinal otherwise).
struct FrequencyRecord {
    std::string token;
    int slice = 0;
    double count = 0.0;
};

/// Token cleanup knobs. Applied in fixed order: strip POS tags, lowercase,
/// alphabetic filter. Application is idempotent.
struct TokenPolicy {
    bool strip_pos_tags = false;
    bool lowercase = false;
    bool alphabetic_only = false;
    double min_count = 0.0;  // applied to merged per-slice totals
};

/// Aggregated counts for one time slice.
struct FrequencyTable {
    int slice = 0;
    std::unordered_map<std::string, double> entries;
    double total = 0.0;
};

/// Inclusive slice interval.
struct SliceRange {
    int first = std::numeric_limits<int>::min();
    int last = std::numeric_limits<int>::max();

    bool contains(int slice) const { return slice >= first && slice <= last; }
    bool empty() const { return first > last; }
};

enum class CorpusFormat { NgramTsv, GenericCsv };

/// Parse one Google Books 1-gram line: token TAB year TAB match_count TAB
/// volume_count (the fourth field is ignored, extra fields tolerated).
/// Returns nullopt on a malformed line and fills `error` when given.
std::optional<FrequencyRecord> parse_ngram_line(std::string_view line,
                                                std::string* error = nullptr);

/// Parse one generic ranked-series CSV record: id,slice,score with score a
/// non-negative decimal.
std::optional<FrequencyRecord> parse_csv_record(std::string_view line,
                                                std::string* error = nullptr);

/// Apply the policy to a token. Empty optional means the record is dropped.
std::optional<std::string> normalize_token(std::string_view token,
                                           const TokenPolicy& policy);

struct IngestStats {
    std::uint64_t lines_read = 0;
    std::uint64_t records_parsed = 0;
    std::uint64_t malformed_lines = 0;
    std::uint64_t rejected_tokens = 0;     // dropped by the token policy
    std::uint64_t out_of_range = 0;        // slice outside the requested range
    std::uint64_t below_min_count = 0;     // merged tokens pruned at finalize
    double kept_count_mass = 0.0;          // sum of counts in the output tables
    double dropped_count_mass = 0.0;       // sum of counts of dropped records

    void merge(const IngestStats& other);
};

/// Streaming accumulator: records go in one at a time, only per-slice
/// aggregates are held. Merging two builders is associative and commutative,
/// so parallel reductions over input shards are valid.
class TableBuilder {
public:
    TableBuilder(TokenPolicy policy, SliceRange range);

    void add(const FrequencyRecord& record);
    void merge(TableBuilder&& other);

    /// Applies min_count pruning, fills totals, returns tables sorted by
    /// slice. The builder's tables are consumed; stats() stays valid and
    /// includes the pruning counters afterwards.
    std::vector<FrequencyTable> finalize() &&;

    const IngestStats& stats() const { return stats_; }
    IngestStats& stats() { return stats_; }

private:
    TokenPolicy policy_;
    SliceRange range_;
    std::map<int, std::unordered_map<std::string, double>> slices_;
    IngestStats stats_;
};

struct IngestOptions {
    TokenPolicy policy;
    SliceRange range;
    CorpusFormat format = CorpusFormat::NgramTsv;
    bool strict = false;  // abort on the first malformed line instead of skipping
};

struct IngestResult {
    std::vector<FrequencyTable> tables;
    IngestStats stats;
};

/// Stream a set of corpus files into per-slice tables. Files are parsed in
/// parallel; partial builders merge into one result.
IngestResult ingest_files(const std::vector<std::filesystem::path>& paths,
                          const IngestOptions& options);

/// Single-threaded reference implementation with identical output.
IngestResult ingest_files_serial(const std::vector<std::filesystem::path>& paths,
                                 const IngestOptions& options);

/// Serialize a table to two-column TSV `token TAB count`, descending count,
/// ties in ascending token byte order. Round-trips bit-exactly.
std::string to_tsv(const FrequencyTable& table);

/// Parse the TSV form back. Entries must be valid; throws DataError.
FrequencyTable frequency_table_from_tsv(std::string_view content, int slice,
                                        std::string_view source_name = "<memory>");

/// Write each table to `<slice>.tsv` under out_dir. Returns the paths written.
std::vector<std::filesystem::path> write_tables(
    const std::vector<FrequencyTable>& tables, const std::filesystem::path& out_dir);

}  // namespace rankdiv

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankdiv/ingest.hpp"

namespace rankdiv {

using TokenId = std::uint32_t;
using Rank = std::uint32_t;

/// Token <-> id interner shared by all slices of a corpus.
class Vocabulary {
public:
    TokenId intern(std::string_view token);
    const std::string& token(TokenId id) const { return tokens_[id]; }
    /// kInvalidToken when the token is unknown.
    TokenId find(std::string_view token) const;
    std::size_t size() const { return tokens_.size(); }

    static constexpr TokenId kInvalidToken = static_cast<TokenId>(-1);

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view sv) const {
            return std::hash<std::string_view>{}(sv);
        }
    };

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
};

/// One time slice ranked by descending count; ids[r-1] is the token at rank
/// r. `counts` is parallel to `ids`; it is empty for synthetic slices that
/// carry no frequency information.
struct RankedSlice {
    int slice = 0;
    std::vector<TokenId> ids;
    std::vector<double> counts;

    std::size_t size() const { return ids.size(); }
    /// Synthetic slices report N - k + 1 so counts stay strictly decreasing.
    double count_at_rank(Rank k) const {
        return counts.empty() ? static_cast<double>(ids.size() - k + 1) : counts[k - 1];
    }
};

/// An ordered set of rank tables over a shared vocabulary.
struct RankedCorpus {
    Vocabulary vocab;
    std::vector<RankedSlice> slices;

    std::size_t slice_count() const { return slices.size(); }
    std::size_t min_slice_size() const;
    const RankedSlice* find_slice(int slice) const;
};

/// Rank one frequency table: descending count, ties in ascending token byte
/// order. Throws DomainError on an empty table.
RankedSlice rank_slice(const FrequencyTable& table, Vocabulary& vocab);

/// Rank a set of frequency tables into a corpus ordered by slice.
RankedCorpus build_corpus(const std::vector<FrequencyTable>& tables);

/// One token's rank per slice; slices where it is absent carry no point.
struct RankTrajectory {
    std::string token;
    std::vector<std::pair<int, Rank>> points;  // (slice, rank), ascending slice
};

RankTrajectory trajectory(const RankedCorpus& corpus, std::string_view token);

/// First n tokens of a slice in rank order. Throws DomainError if n exceeds
/// the slice size.
std::vector<std::string> top_k(const RankedCorpus& corpus, const RankedSlice& slice,
                               std::size_t n);

/// Same, with stoplisted tokens removed before taking the first n.
std::vector<std::string> top_k_filtered(const RankedCorpus& corpus,
                                        const RankedSlice& slice, std::size_t n,
                                        const std::vector<std::string>& stoplist);

/// source token -> reference-language token.
using TranslationMap = std::unordered_map<std::string, std::string>;

/// Fraction of `other` whose translations land in `reference`. Multiple
/// sources translating to one target count once (set intersection); mapping
/// misses count as non-overlap. Lists must have equal non-zero length.
double overlap(const std::vector<std::string>& reference,
               const std::vector<std::string>& other,
               const TranslationMap& mapping);

/// Identity-map convenience.
double overlap(const std::vector<std::string>& reference,
               const std::vector<std::string>& other);

/// Load a two-column TSV `source TAB target`. Duplicate sources keep the
/// first entry; the number of duplicates is reported through `warnings`.
TranslationMap load_translation_map(const std::filesystem::path& path,
                                    std::size_t* warnings = nullptr);

/// Newline-separated token list (stoplists and similar).
std::vector<std::string> load_token_list(const std::filesystem::path& path);

/// Rank-table TSV: `rank TAB token TAB count`.
std::string rank_slice_to_tsv(const RankedCorpus& corpus, const RankedSlice& slice);

/// Load a directory of `<slice>.tsv` tables into a corpus. Accepts both the
/// two-column frequency form and the three-column rank form; two-column rows
/// are expected presorted (descending count, ties ascending token), which is
/// how write_tables emits them.
RankedCorpus load_corpus_dir(const std::filesystem::path& dir);

/// Write every slice as `<slice>.tsv` in rank-table TSV form.
std::vector<std::filesystem::path> write_rank_tables(const RankedCorpus& corpus,
                                                     const std::filesystem::path& out_dir);

}  // namespace rankdiv

#include "rankdiv/rank_table.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>
#include <unordered_set>

#include "rankdiv/errors.hpp"
#include "rankdiv/io.hpp"

namespace rankdiv {

TokenId Vocabulary::intern(std::string_view token) {
    const auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<TokenId>(tokens_.size());
    tokens_.emplace_back(token);
    index_.emplace(tokens_.back(), id);
    return id;
}

TokenId Vocabulary::find(std::string_view token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? kInvalidToken : it->second;
}

std::size_t RankedCorpus::min_slice_size() const {
    std::size_t smallest = slices.empty() ? 0 : slices.front().size();
    for (const auto& slice : slices) smallest = std::min(smallest, slice.size());
    return smallest;
}

const RankedSlice* RankedCorpus::find_slice(int slice) const {
    for (const auto& s : slices) {
        if (s.slice == slice) return &s;
    }
    return nullptr;
}

RankedSlice rank_slice(const FrequencyTable& table, Vocabulary& vocab) {
    if (table.entries.empty()) {
        throw DomainError("rank_slice: empty frequency table for slice " +
                          std::to_string(table.slice));
    }
    std::vector<std::pair<std::string_view, double>> rows;
    rows.reserve(table.entries.size());
    for (const auto& [token, count] : table.entries) rows.emplace_back(token, count);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    RankedSlice slice;
    slice.slice = table.slice;
    slice.ids.reserve(rows.size());
    slice.counts.reserve(rows.size());
    for (const auto& [token, count] : rows) {
        slice.ids.push_back(vocab.intern(token));
        slice.counts.push_back(count);
    }
    return slice;
}

RankedCorpus build_corpus(const std::vector<FrequencyTable>& tables) {
    RankedCorpus corpus;
    corpus.slices.reserve(tables.size());
    for (const auto& table : tables) corpus.slices.push_back(rank_slice(table, corpus.vocab));
    std::sort(corpus.slices.begin(), corpus.slices.end(),
              [](const RankedSlice& a, const RankedSlice& b) { return a.slice < b.slice; });
    return corpus;
}

RankTrajectory trajectory(const RankedCorpus& corpus, std::string_view token) {
    RankTrajectory traj;
    traj.token = std::string(token);
    const TokenId id = corpus.vocab.find(token);
    if (id == Vocabulary::kInvalidToken) return traj;
    for (const auto& slice : corpus.slices) {
        const auto it = std::find(slice.ids.begin(), slice.ids.end(), id);
        if (it != slice.ids.end()) {
            traj.points.emplace_back(slice.slice,
                                     static_cast<Rank>(it - slice.ids.begin()) + 1);
        }
    }
    return traj;
}

std::vector<std::string> top_k(const RankedCorpus& corpus, const RankedSlice& slice,
                               std::size_t n) {
    if (n == 0 || n > slice.size()) {
        throw DomainError("top_k: n=" + std::to_string(n) + " out of range for slice of " +
                          std::to_string(slice.size()) + " tokens");
    }
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(corpus.vocab.token(slice.ids[i]));
    return tokens;
}

std::vector<std::string> top_k_filtered(const RankedCorpus& corpus,
                                        const RankedSlice& slice, std::size_t n,
                                        const std::vector<std::string>& stoplist) {
    const std::set<std::string_view> stop(stoplist.begin(), stoplist.end());
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (const TokenId id : slice.ids) {
        const std::string& token = corpus.vocab.token(id);
        if (stop.contains(token)) continue;
        tokens.push_back(token);
        if (tokens.size() == n) return tokens;
    }
    throw DomainError("top_k_filtered: fewer than " + std::to_string(n) +
                      " tokens remain after the stoplist");
}

namespace {

double overlap_impl(const std::vector<std::string>& reference,
                    const std::vector<std::string>& other,
                    const TranslationMap* mapping) {
    if (reference.empty() || reference.size() != other.size()) {
        throw DomainError("overlap: lists must have equal non-zero length");
    }
    const std::set<std::string_view> ref(reference.begin(), reference.end());
    std::set<std::string_view> hits;
    for (const auto& token : other) {
        std::string_view translated = token;
        if (mapping) {
            const auto it = mapping->find(token);
            if (it == mapping->end()) continue;  // miss counts as non-overlap
            translated = it->second;
        }
        if (ref.contains(translated)) hits.insert(translated);
    }
    return static_cast<double>(hits.size()) / static_cast<double>(other.size());
}

}  // namespace

double overlap(const std::vector<std::string>& reference,
               const std::vector<std::string>& other, const TranslationMap& mapping) {
    return overlap_impl(reference, other, &mapping);
}

double overlap(const std::vector<std::string>& reference,
               const std::vector<std::string>& other) {
    return overlap_impl(reference, other, nullptr);
}

TranslationMap load_translation_map(const std::filesystem::path& path, std::size_t* warnings) {
    const std::string content = read_file(path);
    TranslationMap map;
    std::size_t dupes = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size()) {
            throw DataError("expected 'source TAB target'", path.string(), line_no);
        }
        const auto [it, inserted] =
            map.emplace(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
        if (!inserted) ++dupes;  // first entry wins
    }
    if (warnings) *warnings = dupes;
    return map;
}

std::vector<std::string> load_token_list(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        if (!line.empty()) tokens.emplace_back(line);
    }
    return tokens;
}

std::string rank_slice_to_tsv(const RankedCorpus& corpus, const RankedSlice& slice) {
    std::string out;
    for (std::size_t i = 0; i < slice.size(); ++i) {
        out.append(std::to_string(i + 1));
        out.push_back('\t');
        out.append(corpus.vocab.token(slice.ids[i]));
        out.push_back('\t');
        out.append(format_number(slice.count_at_rank(static_cast<Rank>(i + 1))));
        out.push_back('\n');
    }
    return out;
}

namespace {

RankedSlice parse_slice_tsv(const std::string& content, int slice_index,
                            const std::string& source, Vocabulary& vocab) {
    RankedSlice slice;
    slice.slice = slice_index;
    std::unordered_set<TokenId> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    double previous_count = std::numeric_limits<double>::infinity();
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        const std::size_t t1 = line.find('\t');
        if (t1 == std::string_view::npos || t1 == 0) {
            throw DataError("expected TSV rank table row", source, line_no);
        }
        const std::size_t t2 = line.find('\t', t1 + 1);

        std::string_view token;
        std::string_view count_field;
        if (t2 == std::string_view::npos) {
            // Two-column frequency form: token TAB count, presorted.
            token = line.substr(0, t1);
            count_field = line.substr(t1 + 1);
        } else {
            // Three-column rank form: rank TAB token TAB count.
            std::uint64_t rank = 0;
            const std::string_view rank_field = line.substr(0, t1);
            const auto [ptr, ec] =
                std::from_chars(rank_field.data(), rank_field.data() + rank_field.size(), rank);
            if (ec != std::errc() || ptr != rank_field.data() + rank_field.size() ||
                rank != slice.ids.size() + 1) {
                throw DataError("rank column must count 1..N without gaps", source, line_no);
            }
            token = line.substr(t1 + 1, t2 - t1 - 1);
            count_field = line.substr(t2 + 1);
        }
        if (token.empty()) throw DataError("empty token", source, line_no);

        double count = 0.0;
        const auto [cp, cec] =
            std::from_chars(count_field.data(), count_field.data() + count_field.size(), count);
        if (cec != std::errc() || cp != count_field.data() + count_field.size()) {
            throw DataError("count is not a decimal number", source, line_no);
        }
        if (count > previous_count) {
            throw DataError("counts must be non-increasing with rank", source, line_no);
        }
        previous_count = count;
        const TokenId id = vocab.intern(token);
        if (!seen.insert(id).second) {
            throw DataError("duplicate token '" + std::string(token) + "'", source, line_no);
        }
        slice.ids.push_back(id);
        slice.counts.push_back(count);
    }
    if (slice.ids.empty()) throw DataError("empty rank table", source, 0);
    return slice;
}

}  // namespace

RankedCorpus load_corpus_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw DataError("not a directory", dir.string(), 0);
    }
    std::vector<std::pair<int, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".tsv") continue;
        const std::string stem = entry.path().stem().string();
        int slice = 0;
        const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), slice);
        if (ec != std::errc() || ptr != stem.data() + stem.size()) continue;
        files.emplace_back(slice, entry.path());
    }
    if (files.empty()) throw DataError("no <slice>.tsv tables found", dir.string(), 0);
    std::sort(files.begin(), files.end());

    RankedCorpus corpus;
    corpus.slices.reserve(files.size());
    for (const auto& [slice, path] : files) {
        corpus.slices.push_back(
            parse_slice_tsv(read_file(path), slice, path.string(), corpus.vocab));
    }
    return corpus;
}

std::vector<std::filesystem::path> write_rank_tables(const RankedCorpus& corpus,
                                                     const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    written.reserve(corpus.slices.size());
    for (const auto& slice : corpus.slices) {
        const auto path = out_dir / (std::to_string(slice.slice) + ".tsv");
        atomic_write_file(path, rank_slice_to_tsv(corpus, slice));
        written.push_back(path);
    }
    return written;
}

}  // namespace rankdiv

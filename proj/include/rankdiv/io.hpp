#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace rankdiv {

/// Shortest decimal text that parses back to exactly the same double.
/// Integral values print without a decimal point.
std::string format_number(double value);

/// Write `content` to `path` atomically: temp file in the same directory,
/// then rename. No partial file is ever visible at `path`.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::filesystem::path& path);

/// Digest of a file, or of a directory's regular files (name + content,
/// sorted by name).
std::string path_digest(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Read a whole file; throws DataError with path context on failure.
std::string read_file(const std::filesystem::path& path);

}  // namespace rankdiv

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace loopqrng {

/// Writes content to a sibling temp file, then renames over path.
/// Readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

/// Whole-file read; throws DataError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace loopqrng

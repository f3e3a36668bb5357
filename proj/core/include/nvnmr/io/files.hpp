#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace nvnmr::io {

/// Writes `content` to a temporary file beside `path` and renames it into
/// place, so readers never see a partial file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace nvnmr::io

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace finmatcher::io {

/// Reads a whole file; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace finmatcher::io

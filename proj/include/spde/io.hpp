#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace spde {

/// Shortest-roundtrip-safe decimal form (%.17g); "nan"/"inf" for non-finite values.
std::string format_double(double x);

/// Writes `content` to a temporary sibling of `path` and renames it into
/// place, so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

} // namespace spde

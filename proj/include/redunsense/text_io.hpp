#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace redunsense {

/// Shortest decimal text that parses back to the same double. Integral values
/// keep a trailing ".0"; non-finite values print as "nan", "inf", "-inf".
std::string format_double(double value);

/// Inverse of format_double. Throws std::invalid_argument on malformed text.
double parse_double(std::string_view text);

/// Writes `content` to a sibling temporary file and renames it into place, so
/// a failed run never leaves a partial file behind. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace redunsense

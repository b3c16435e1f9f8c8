#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace scidsi::util {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

std::string format_optional(const std::optional<double>& value);

/// Lowercase hex SHA-256 of a byte string / file contents.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace scidsi::util

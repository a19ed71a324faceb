#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vinerisk {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double v, int decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

/// Comma split without quoting; CRLF line endings are tolerated.
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// FNV-1a, used for data and model fingerprints.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

} // namespace vinerisk

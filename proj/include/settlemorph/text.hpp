#pragma once

// Small text helpers shared by the CSV/INI readers and writers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace settlemorph::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Splits on a single delimiter; no quoting (ids and paths in this project never contain commas).
std::vector<std::string> split(std::string_view line, char delim);

/// Whitespace tokenizer.
std::vector<std::string> tokens(std::string_view line);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// FNV-1a 64-bit; stable across platforms, used for run-manifest hashes.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

/// Hash of a file's bytes. Throws IoError if unreadable.
std::uint64_t hash_file(const std::string& path);

}  // namespace settlemorph::text

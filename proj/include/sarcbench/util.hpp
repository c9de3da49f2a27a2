#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sarcbench {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view text, std::string_view prefix);

/// Hex-encoded SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Raw 32-byte SHA-256 digest.
std::vector<std::uint8_t> sha256_bytes(std::string_view data);

/// Filesystem-safe slug: lowercase alphanumerics, everything else collapsed to '-'.
std::string slugify(std::string_view s);

std::string read_file(const std::filesystem::path& path);

/// Write-temp-then-rename so concurrent readers never see a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split_lines(std::string_view text);

/// Non-empty blocks separated by blank lines.
std::vector<std::string> split_paragraphs(std::string_view text);

std::string replace_all(std::string text, std::string_view from, std::string_view to);

/// Shortest decimal form that round-trips the double (used by csv output).
std::string format_full(double v);

/// Fixed-point with `decimals` digits (used by markdown reports).
std::string format_fixed(double v, int decimals);

}  // namespace sarcbench

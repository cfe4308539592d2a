#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace linkaudit {

// Locale-independent ASCII classification.
constexpr bool ascii_isdigit(char c) noexcept { return c >= '0' && c <= '9'; }
constexpr bool ascii_isalpha(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
constexpr bool ascii_isalnum(char c) noexcept { return ascii_isdigit(c) || ascii_isalpha(c); }
constexpr bool ascii_isspace(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr char ascii_tolower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;
std::string_view trim(std::string_view s) noexcept;

/// Splits on every occurrence of `sep`; keeps empty pieces.
std::vector<std::string_view> split(std::string_view s, char sep);

/// Whole file as bytes. Throws LoadError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace linkaudit

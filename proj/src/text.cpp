#include "linkaudit/text.hpp"

#include <fstream>
#include <sstream>

#include "linkaudit/errors.hpp"

namespace linkaudit {

LoadError::LoadError(std::string source, std::size_t line, const std::string& what)
    : Error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_tolower(c);
  return out;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (ascii_tolower(a[i]) != ascii_tolower(b[i])) return false;
  return true;
}

bool istarts_with(std::string_view s, std::string_view prefix) noexcept {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && ascii_isspace(s.front())) s.remove_prefix(1);
  while (!s.empty() && ascii_isspace(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError(tmp.string(), 0, "cannot open file for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw LoadError(tmp.string(), 0, "write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace linkaudit

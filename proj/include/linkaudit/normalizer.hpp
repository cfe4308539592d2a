#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "linkaudit/errors.hpp"

namespace linkaudit {

/// A cited URL after the full normalization pipeline.
///
/// Invariants: ASCII only, lowercase scheme and host, `port` never holds the
/// scheme default, `path` is never empty.
struct NormalizedUrl {
  std::string scheme = "http";
  std::string host;
  std::optional<std::uint16_t> port;
  std::string path = "/";
  std::optional<std::string> query;

  /// Canonical text form, e.g. "http://example.org:8080/a?b".
  std::string str() const;

  /// Splits a string already in canonical form. No rules are applied; use this
  /// to read back URLs written by this library.
  static std::optional<NormalizedUrl> from_canonical(std::string_view text);

  friend bool operator==(const NormalizedUrl&, const NormalizedUrl&) = default;
};

/// Which normalization rule rejected a candidate link.
enum class DiscardKind { NonAsciiIrreducible, Malformed, UnknownTld, NonNumericPort, Blacklisted };

std::string_view to_string(DiscardKind kind);

struct DiscardReason {
  DiscardKind kind;
  std::string detail;
};

using NormalizeResult = std::variant<NormalizedUrl, DiscardReason>;

using TldSet = std::set<std::string, std::less<>>;

/// Snapshot of the IANA root zone, plus "localhost".
const TldSet& bundled_tld_set();

/// One TLD per line, '#' starts a comment, case-insensitive.
TldSet parse_tld_list(std::string_view text);

/// Throws LoadError when the file cannot be read. An empty result appends a
/// warning to `warnings`.
TldSet load_tld_set(const std::filesystem::path& path, Diagnostics& warnings);

/// Host-suffix and URL-prefix exclusion rules.
class Blacklist {
 public:
  /// Matches the host itself and any subdomain of it.
  void add_host(std::string pattern);
  /// Matches any canonical URL starting with `prefix`.
  void add_url_prefix(std::string prefix);

  /// Returns the matching rule as written in a blacklist file, e.g.
  /// "host:arxiv.org".
  std::optional<std::string> match(const NormalizedUrl& url) const;

  bool empty() const noexcept { return hosts_.empty() && prefixes_.empty(); }
  std::size_t size() const noexcept { return hosts_.size() + prefixes_.size(); }

  /// Default rules: loopback, documentation domains, DOI resolvers, arXiv and
  /// its mirrors, repository proxies.
  static const Blacklist& bundled();

 private:
  std::vector<std::string> hosts_;
  std::vector<std::string> prefixes_;
};

/// Lines of "host:<suffix>" or "url:<prefix>"; '#' comments. Throws LoadError
/// naming the line for anything else.
Blacklist parse_blacklist(std::string_view text, std::string_view source = "<blacklist>");
Blacklist load_blacklist(const std::filesystem::path& path);

std::optional<std::string> is_blacklisted(const NormalizedUrl& url, const Blacklist& blacklist);

/// Applies, in order: ASCII reduction (U+223C becomes '~'), scheme insertion,
/// root path insertion, known-TLD check, port check and default-port removal,
/// host lowercasing, blacklist. Fragments are dropped. The first failing rule
/// determines the DiscardReason.
NormalizeResult normalize(std::string_view raw, const TldSet& tlds, const Blacklist& blacklist);

/// Bundles the lookup tables so callers can pass one object around.
class Normalizer {
 public:
  Normalizer();
  Normalizer(TldSet tlds, Blacklist blacklist);

  NormalizeResult operator()(std::string_view raw) const {
    return normalize(raw, tlds_, blacklist_);
  }

  const TldSet& tlds() const noexcept { return tlds_; }
  const Blacklist& blacklist() const noexcept { return blacklist_; }

 private:
  TldSet tlds_;
  Blacklist blacklist_;
};

}  // namespace linkaudit

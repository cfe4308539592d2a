#include "linkaudit/normalizer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "linkaudit/text.hpp"

namespace linkaudit {

namespace detail {
extern const std::string_view kBundledTldText;
extern const std::string_view kBundledBlacklistText;
}  // namespace detail

namespace {

constexpr std::string_view kTildeOperator = "\xE2\x88\xBC";  // U+223C in UTF-8

// Characters that can never appear unescaped in a URL we emit.
bool is_unsafe(unsigned char c) {
  if (c <= 0x20 || c == 0x7F) return true;
  switch (c) {
    case '<': case '>': case '"': case '{': case '}': case '|': case '\\': case '^': case '`':
      return true;
    default:
      return false;
  }
}

bool is_host_char(char c) {
  return ascii_isalnum(c) || c == '-' || c == '_' || c == '.';
}

bool is_ipv4_literal(std::string_view host) {
  int labels = 0;
  for (auto label : split(host, '.')) {
    if (label.empty() || label.size() > 3) return false;
    int value = 0;
    for (char c : label) {
      if (!ascii_isdigit(c)) return false;
      value = value * 10 + (c - '0');
    }
    if (value > 255) return false;
    ++labels;
  }
  return labels == 4;
}

std::optional<std::size_t> scheme_length(std::string_view s) {
  // [A-Za-z][A-Za-z0-9+.-]* followed by "://"
  if (s.empty() || !ascii_isalpha(s[0])) return std::nullopt;
  std::size_t i = 1;
  while (i < s.size() && (ascii_isalnum(s[i]) || s[i] == '+' || s[i] == '-' || s[i] == '.')) ++i;
  if (s.substr(i, 3) != "://") return std::nullopt;
  return i;
}

DiscardReason discard(DiscardKind kind, std::string detail) {
  return DiscardReason{kind, std::move(detail)};
}

std::uint16_t default_port(std::string_view scheme) { return scheme == "https" ? 443 : 80; }

}  // namespace

std::string_view to_string(DiscardKind kind) {
  switch (kind) {
    case DiscardKind::NonAsciiIrreducible: return "non_ascii";
    case DiscardKind::Malformed: return "malformed";
    case DiscardKind::UnknownTld: return "unknown_tld";
    case DiscardKind::NonNumericPort: return "non_numeric_port";
    case DiscardKind::Blacklisted: return "blacklisted";
  }
  return "unknown";
}

std::string NormalizedUrl::str() const {
  std::string out;
  out.reserve(scheme.size() + host.size() + path.size() + 16);
  out += scheme;
  out += "://";
  out += host;
  if (port) {
    out += ':';
    out += std::to_string(*port);
  }
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

std::optional<NormalizedUrl> NormalizedUrl::from_canonical(std::string_view text) {
  const auto slen = scheme_length(text);
  if (!slen) return std::nullopt;
  NormalizedUrl url;
  url.scheme = std::string(text.substr(0, *slen));
  std::string_view rest = text.substr(*slen + 3);
  const auto auth_end = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, auth_end);
  rest = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);
  if (const auto colon = std::find(authority.begin(), authority.end(), ':'); colon != authority.end()) {
    unsigned value = 0;
    const std::string_view digits(colon + 1, authority.end());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value == 0 || value > 65535)
      return std::nullopt;
    url.port = static_cast<std::uint16_t>(value);
    authority = std::string_view(authority.begin(), colon);
  }
  if (authority.empty()) return std::nullopt;
  url.host = std::string(authority);
  const auto q = std::find(rest.begin(), rest.end(), '?');
  url.path = std::string(rest.begin(), q);
  if (url.path.empty()) url.path = "/";
  if (q != rest.end()) url.query = std::string(q + 1, rest.end());
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;
  if (url.host != to_lower(url.host)) return std::nullopt;
  if (url.port && *url.port == default_port(url.scheme)) return std::nullopt;
  if (url.str() != text) return std::nullopt;
  return url;
}

const TldSet& bundled_tld_set() {
  static const TldSet set = parse_tld_list(detail::kBundledTldText);
  return set;
}

TldSet parse_tld_list(std::string_view text) {
  TldSet out;
  for (auto line : split(text, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '.') line.remove_prefix(1);
    out.insert(to_lower(line));
  }
  return out;
}

TldSet load_tld_set(const std::filesystem::path& path, Diagnostics& warnings) {
  const auto text = read_file(path);
  TldSet set = parse_tld_list(text);
  if (set.empty())
    warnings.push_back("TLD file " + path.string() + " is empty; every URL will be discarded");
  return set;
}

void Blacklist::add_host(std::string pattern) { hosts_.push_back(to_lower(pattern)); }

void Blacklist::add_url_prefix(std::string prefix) { prefixes_.push_back(std::move(prefix)); }

std::optional<std::string> Blacklist::match(const NormalizedUrl& url) const {
  for (const auto& pattern : hosts_) {
    const std::string_view host = url.host;
    if (host == pattern) return "host:" + pattern;
    if (host.size() > pattern.size() && host.ends_with(pattern) &&
        host[host.size() - pattern.size() - 1] == '.')
      return "host:" + pattern;
  }
  if (!prefixes_.empty()) {
    const std::string rendered = url.str();
    for (const auto& prefix : prefixes_)
      if (std::string_view(rendered).starts_with(prefix)) return "url:" + prefix;
  }
  return std::nullopt;
}

const Blacklist& Blacklist::bundled() {
  static const Blacklist list = parse_blacklist(detail::kBundledBlacklistText, "<bundled>");
  return list;
}

Blacklist parse_blacklist(std::string_view text, std::string_view source) {
  Blacklist list;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.starts_with("host:")) {
      const auto pattern = trim(line.substr(5));
      if (pattern.empty()) throw LoadError(std::string(source), line_no, "empty host pattern");
      list.add_host(std::string(pattern));
    } else if (line.starts_with("url:")) {
      const auto prefix = trim(line.substr(4));
      if (prefix.empty()) throw LoadError(std::string(source), line_no, "empty url prefix");
      list.add_url_prefix(std::string(prefix));
    } else {
      throw LoadError(std::string(source), line_no,
                      "expected 'host:' or 'url:' rule, got '" + std::string(line) + "'");
    }
  }
  return list;
}

Blacklist load_blacklist(const std::filesystem::path& path) {
  return parse_blacklist(read_file(path), path.string());
}

std::optional<std::string> is_blacklisted(const NormalizedUrl& url, const Blacklist& blacklist) {
  return blacklist.match(url);
}

NormalizeResult normalize(std::string_view raw, const TldSet& tlds, const Blacklist& blacklist) {
  raw = trim(raw);

  // Rule 1: ASCII only, with the tilde operator folded to '~'.
  std::string s;
  s.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (c < 0x80) {
      s.push_back(static_cast<char>(c));
    } else if (raw.substr(i, kTildeOperator.size()) == kTildeOperator) {
      s.push_back('~');
      i += kTildeOperator.size() - 1;
    } else {
      return discard(DiscardKind::NonAsciiIrreducible,
                     "non-ASCII byte at offset " + std::to_string(i));
    }
  }

  if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  for (char c : s)
    if (is_unsafe(static_cast<unsigned char>(c)))
      return discard(DiscardKind::Malformed, "unsafe character in URL");

  // Rule 2: scheme.
  NormalizedUrl url;
  std::string_view rest;
  if (const auto slen = scheme_length(s)) {
    url.scheme = to_lower(std::string_view(s).substr(0, *slen));
    if (url.scheme != "http" && url.scheme != "https")
      return discard(DiscardKind::Malformed, "unsupported scheme '" + url.scheme + "'");
    rest = std::string_view(s).substr(*slen + 3);
  } else if (s.starts_with("//")) {
    rest = std::string_view(s).substr(2);
  } else {
    rest = s;
  }

  // Rule 3: split authority / path / query, defaulting the path to "/".
  const auto auth_end = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, auth_end);
  std::string_view tail = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);
  const auto q = tail.find('?');
  url.path = std::string(tail.substr(0, q));
  if (url.path.empty()) url.path = "/";
  if (q != std::string_view::npos) url.query = std::string(tail.substr(q + 1));

  if (authority.find('@') != std::string_view::npos)
    return discard(DiscardKind::Malformed, "userinfo is not supported");
  if (authority.starts_with('['))
    return discard(DiscardKind::Malformed, "IPv6 literals are not supported");
  std::string_view host = authority;
  std::optional<std::string_view> port_text;
  if (const auto colon = authority.find(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port_text = authority.substr(colon + 1);
  }
  if (host.ends_with('.')) host.remove_suffix(1);
  if (host.empty()) return discard(DiscardKind::Malformed, "empty host");
  for (char c : host)
    if (!is_host_char(c)) return discard(DiscardKind::Malformed, "invalid host character");
  for (auto label : split(host, '.')) {
    if (label.empty() || label.size() > 63)
      return discard(DiscardKind::Malformed, "invalid host label");
  }

  // Rule 4: known top-level domain. IPv4 literals carry no TLD.
  if (!is_ipv4_literal(host)) {
    const auto dot = host.rfind('.');
    const std::string tld = to_lower(dot == std::string_view::npos ? host : host.substr(dot + 1));
    if (!tlds.contains(tld)) return discard(DiscardKind::UnknownTld, "unknown TLD '" + tld + "'");
  }

  // Rule 5: numeric port, default removed.
  if (port_text && !port_text->empty()) {
    const auto digits = *port_text;
    if (!std::all_of(digits.begin(), digits.end(), ascii_isdigit))
      return discard(DiscardKind::NonNumericPort, "port '" + std::string(digits) + "' is not numeric");
    const auto first = digits.find_first_not_of('0');
    const auto significant = first == std::string_view::npos ? std::string_view{"0"} : digits.substr(first);
    unsigned value = 0;
    if (significant.size() > 5 ||
        std::from_chars(significant.data(), significant.data() + significant.size(), value).ec !=
            std::errc{} ||
        value == 0 || value > 65535)
      return discard(DiscardKind::NonNumericPort, "port '" + std::string(digits) + "' out of range");
    if (value != default_port(url.scheme)) url.port = static_cast<std::uint16_t>(value);
  }

  // Rule 6: lowercase host.
  url.host = to_lower(host);

  // Rule 7: blacklist.
  if (auto rule = blacklist.match(url))
    return discard(DiscardKind::Blacklisted, std::move(*rule));

  return url;
}

Normalizer::Normalizer() : Normalizer(bundled_tld_set(), Blacklist::bundled()) {}

Normalizer::Normalizer(TldSet tlds, Blacklist blacklist)
    : tlds_(std::move(tlds)), blacklist_(std::move(blacklist)) {}

}  // namespace linkaudit

#include "linkaudit/memento.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "linkaudit/text.hpp"

namespace linkaudit {
namespace {

struct LinkEntry {
  std::string uri;
  std::map<std::string, std::string> params;
};

class LinkFormatReader {
 public:
  explicit LinkFormatReader(std::string_view text) : text_(text) {}

  std::vector<LinkEntry> read_all() {
    std::vector<LinkEntry> entries;
    while (true) {
      skip_space();
      if (at_end()) break;
      entries.push_back(read_entry());
      skip_space();
      if (at_end()) break;
      if (peek() != ',') fail("expected ',' between links");
      ++pos_;
    }
    return entries;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw MalformedTimeMap(what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (!at_end() && ascii_isspace(peek())) ++pos_;
  }

  LinkEntry read_entry() {
    if (peek() != '<') fail("expected '<'");
    const auto close = text_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated '<'");
    LinkEntry entry;
    entry.uri = std::string(trim(text_.substr(pos_ + 1, close - pos_ - 1)));
    pos_ = close + 1;
    while (true) {
      skip_space();
      if (at_end() || peek() == ',') return entry;
      if (peek() != ';') fail("expected ';' or ','");
      ++pos_;
      skip_space();
      const std::size_t name_start = pos_;
      while (!at_end() && !ascii_isspace(peek()) && peek() != '=' && peek() != ';' && peek() != ',')
        ++pos_;
      std::string name = to_lower(text_.substr(name_start, pos_ - name_start));
      if (name.empty()) fail("empty parameter name");
      skip_space();
      std::string value;
      if (!at_end() && peek() == '=') {
        ++pos_;
        skip_space();
        value = read_value();
      }
      entry.params.try_emplace(std::move(name), std::move(value));
    }
  }

  std::string read_value() {
    std::string value;
    if (!at_end() && peek() == '"') {
      ++pos_;
      while (true) {
        if (at_end()) fail("unterminated quoted string");
        const char c = text_[pos_++];
        if (c == '"') return value;
        if (c == '\\') {
          if (at_end()) fail("unterminated escape");
          value.push_back(text_[pos_++]);
        } else {
          value.push_back(c);
        }
      }
    }
    while (!at_end() && !ascii_isspace(peek()) && peek() != ';' && peek() != ',') value.push_back(text_[pos_++]);
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<std::string> relation_tokens(const LinkEntry& entry) {
  std::vector<std::string> out;
  const auto it = entry.params.find("rel");
  if (it == entry.params.end()) return out;
  std::string_view rel = it->second;
  std::size_t i = 0;
  while (i < rel.size()) {
    while (i < rel.size() && ascii_isspace(rel[i])) ++i;
    const std::size_t start = i;
    while (i < rel.size() && !ascii_isspace(rel[i])) ++i;
    if (i > start) out.push_back(to_lower(rel.substr(start, i - start)));
  }
  return out;
}

bool has(const std::vector<std::string>& tokens, std::string_view token) {
  return std::find(tokens.begin(), tokens.end(), token) != tokens.end();
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

bool is_retryable(int status) { return status >= 500 || status == 429; }

struct Exchange {
  std::optional<HttpResponse> response;
  std::optional<TransportFailure> failure;
  std::string final_url;
  bool too_many_redirects = false;
};

Exchange get_following(HttpTransport& transport, HttpRequest request, int max_redirects) {
  Exchange ex;
  for (int hop = 0;; ++hop) {
    auto result = transport.send(request);
    if (auto* failure = std::get_if<TransportFailure>(&result)) {
      ex.failure = *failure;
      ex.final_url = request.url;
      return ex;
    }
    auto& response = std::get<HttpResponse>(result);
    const auto location = response.header("Location");
    if (!is_redirect(response.status) || !location || hop >= max_redirects) {
      ex.too_many_redirects = is_redirect(response.status) && location && hop >= max_redirects;
      ex.final_url = request.url;
      ex.response = std::move(response);
      return ex;
    }
    request.url = resolve_reference(request.url, *location);
    if (!split_url(request.url)) {
      ex.final_url = request.url;
      ex.response = std::move(response);
      return ex;
    }
  }
}

std::string describe(const Exchange& ex) {
  if (ex.failure) return std::string(to_string(*ex.failure));
  if (ex.too_many_redirects) return "too many redirects";
  return "HTTP " + std::to_string(ex.response->status);
}

// Runs `attempt` until it yields a final answer or the retry budget is spent.
// `attempt` returns nullopt when the outcome is retryable.
template <class Result, class Attempt>
Result with_retries(const RetryPolicy& retry, Attempt attempt) {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + retry.deadline;
  auto backoff = retry.initial_backoff;
  FetchError error;
  for (int attempts = 1;; ++attempts) {
    error.attempts = attempts;
    if (std::optional<Result> done = attempt(error)) return std::move(*done);
    if (attempts >= std::max(1, retry.max_attempts)) break;
    if (clock::now() + backoff > deadline) {
      error.detail += " (deadline reached)";
      break;
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
  return error;
}

}  // namespace

void sort_mementos(std::vector<Memento>& mementos) {
  std::sort(mementos.begin(), mementos.end(), [](const Memento& a, const Memento& b) {
    if (a.archived_at != b.archived_at) return a.archived_at < b.archived_at;
    return a.uri < b.uri;
  });
}

TimeMap parse_timemap(std::string_view body, Diagnostics* diagnostics) {
  const auto entries = LinkFormatReader(body).read_all();
  TimeMap tm;
  bool have_original = false;
  for (const auto& entry : entries) {
    const auto rels = relation_tokens(entry);
    if (has(rels, "original")) {
      if (have_original && tm.original_uri != entry.uri)
        throw MalformedTimeMap("more than one original resource: " + tm.original_uri + ", " + entry.uri);
      tm.original_uri = entry.uri;
      have_original = true;
    }
    if (has(rels, "self") && !tm.self_uri) tm.self_uri = entry.uri;
    if (has(rels, "timegate") && !tm.timegate_uri) tm.timegate_uri = entry.uri;
    if (has(rels, "memento")) {
      const auto it = entry.params.find("datetime");
      const auto when = it == entry.params.end() ? std::nullopt : parse_http_date(it->second);
      if (!when) {
        if (diagnostics) diagnostics->push_back("memento " + entry.uri + " has no valid datetime; skipped");
        continue;
      }
      tm.mementos.push_back(Memento{entry.uri, *when});
    }
  }
  if (!have_original) throw MalformedTimeMap("no link with rel=\"original\"");
  sort_mementos(tm.mementos);
  return tm;
}

std::string serialize_timemap(const TimeMap& tm) {
  std::vector<std::string> links;
  links.push_back("<" + tm.original_uri + ">;rel=\"original\"");
  if (tm.self_uri) links.push_back("<" + *tm.self_uri + ">;rel=\"self\";type=\"application/link-format\"");
  if (tm.timegate_uri) links.push_back("<" + *tm.timegate_uri + ">;rel=\"timegate\"");
  const auto n = tm.mementos.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string rel = "memento";
    if (i + 1 == n) rel = "last " + rel;
    if (i == 0) rel = "first " + rel;
    links.push_back("<" + tm.mementos[i].uri + ">;rel=\"" + rel + "\";datetime=\"" +
                    format_http_date(tm.mementos[i].archived_at) + "\"");
  }
  std::string out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    out += links[i];
    out += i + 1 < links.size() ? ",\n" : "\n";
  }
  return out;
}

std::string expand_endpoint(std::string_view url_template, std::string_view original_url) {
  std::string out(url_template);
  const auto pos = out.find("{url}");
  if (pos == std::string::npos) return out + std::string(original_url);
  out.replace(pos, 5, original_url);
  return out;
}

TimeMapLookup fetch_timemap(HttpTransport& transport, const NormalizedUrl& url,
                            const ArchiveEndpoint& endpoint, const RetryPolicy& retry) {
  HttpRequest request;
  request.url = expand_endpoint(endpoint.timemap_template, url.str());
  request.headers = {{"Accept", "application/link-format"}};

  return with_retries<TimeMapLookup>(retry, [&](FetchError& error) -> std::optional<TimeMapLookup> {
    const auto ex = get_following(transport, request, endpoint.max_redirects);
    error.detail = describe(ex);
    if (ex.failure) return std::nullopt;
    error.last_status = ex.response->status;
    if (ex.too_many_redirects) return TimeMapLookup{error};
    const int status = ex.response->status;
    if (status == 404 || status == 410) return TimeMapLookup{NotArchived{}};
    if (status == 200) {
      try {
        return TimeMapLookup{parse_timemap(ex.response->body)};
      } catch (const MalformedTimeMap& e) {
        error.detail = std::string("malformed TimeMap: ") + e.what();
        return TimeMapLookup{error};
      }
    }
    if (is_retryable(status)) return std::nullopt;
    return TimeMapLookup{error};
  });
}

TimeGateLookup timegate_resolve(HttpTransport& transport, const NormalizedUrl& url, UtcTime desired,
                                const ArchiveEndpoint& endpoint, const RetryPolicy& retry) {
  HttpRequest request;
  request.url = expand_endpoint(endpoint.timegate_template, url.str());
  request.headers = {{"Accept-Datetime", format_http_date(desired)}};
  request.want_body = false;

  auto make_memento = [](std::string uri, const std::string& datetime) -> TimeGateLookup {
    if (const auto t = parse_http_date(trim(datetime))) return Memento{std::move(uri), *t};
    return ProtocolError{"malformed Memento-Datetime '" + datetime + "'"};
  };

  return with_retries<TimeGateLookup>(retry, [&](FetchError& error) -> std::optional<TimeGateLookup> {
    auto result = transport.send(request);
    if (auto* failure = std::get_if<TransportFailure>(&result)) {
      error.detail = std::string(to_string(*failure));
      return std::nullopt;
    }
    const auto& gate = std::get<HttpResponse>(result);
    error.last_status = gate.status;
    error.detail = "HTTP " + std::to_string(gate.status);
    if (gate.status == 404 || gate.status == 410) return TimeGateLookup{NotArchived{}};
    if (is_retryable(gate.status)) return std::nullopt;

    const auto location = gate.header("Location");
    if (is_redirect(gate.status) && location) {
      HttpRequest follow;
      follow.method = "GET";
      follow.url = resolve_reference(request.url, *location);
      follow.want_body = false;
      if (!split_url(follow.url)) return TimeGateLookup{ProtocolError{"unusable Location " + *location}};
      const auto ex = get_following(transport, follow, endpoint.max_redirects);
      if (ex.failure) {
        error.detail = "memento: " + describe(ex);
        return std::nullopt;
      }
      auto header = ex.response->header("Memento-Datetime");
      if (!header) header = gate.header("Memento-Datetime");
      if (!header) return TimeGateLookup{ProtocolError{"memento " + ex.final_url + " has no Memento-Datetime"}};
      return make_memento(ex.final_url, *header);
    }

    // The TimeGate may answer with the memento itself.
    if (gate.status >= 200 && gate.status < 300) {
      if (const auto header = gate.header("Memento-Datetime")) {
        const auto where = gate.header("Content-Location");
        return make_memento(where ? resolve_reference(request.url, *where) : request.url, *header);
      }
      return TimeGateLookup{NotArchived{}};
    }
    return TimeGateLookup{error};
  });
}

}  // namespace linkaudit

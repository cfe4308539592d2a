#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "linkaudit/errors.hpp"
#include "linkaudit/http.hpp"
#include "linkaudit/normalizer.hpp"
#include "linkaudit/time.hpp"

namespace linkaudit {

/// An archived copy (URI-M) and the instant it was captured.
struct Memento {
  std::string uri;
  UtcTime archived_at;

  friend bool operator==(const Memento&, const Memento&) = default;
};

/// All known Mementos of one original resource, ascending by capture time,
/// ties ordered by URI.
struct TimeMap {
  std::string original_uri;
  std::optional<std::string> timegate_uri;
  std::optional<std::string> self_uri;
  std::vector<Memento> mementos;

  friend bool operator==(const TimeMap&, const TimeMap&) = default;
};

void sort_mementos(std::vector<Memento>& mementos);

/// Parses an application/link-format TimeMap. Entries whose relation list
/// contains "memento" become Mementos; unknown relations are ignored; memento
/// entries without a valid datetime are skipped and noted in `diagnostics`.
/// Throws MalformedTimeMap on syntax errors or a missing/ambiguous original.
TimeMap parse_timemap(std::string_view body, Diagnostics* diagnostics = nullptr);

std::string serialize_timemap(const TimeMap& timemap);

struct NotArchived {
  friend bool operator==(NotArchived, NotArchived) = default;
};

struct FetchError {
  int attempts = 0;
  std::optional<int> last_status;
  std::string detail;
};

struct ProtocolError {
  std::string detail;
};

using TimeMapLookup = std::variant<TimeMap, NotArchived, FetchError>;
using TimeGateLookup = std::variant<Memento, NotArchived, FetchError, ProtocolError>;

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds deadline{30000};
};

/// Endpoint templates; "{url}" is replaced by the original URL, or the URL is
/// appended when the template has no placeholder.
struct ArchiveEndpoint {
  std::string timemap_template = "http://localhost:8080/timemap/link/{url}";
  std::string timegate_template = "http://localhost:8080/timegate/{url}";
  int max_redirects = 5;
};

std::string expand_endpoint(std::string_view url_template, std::string_view original_url);

/// 200 with a parseable body -> TimeMap; 404 -> NotArchived; transport
/// failures, 5xx and 429 are retried under `retry` and end in FetchError.
TimeMapLookup fetch_timemap(HttpTransport& transport, const NormalizedUrl& url,
                            const ArchiveEndpoint& endpoint, const RetryPolicy& retry = {});

/// Datetime negotiation against a TimeGate with Accept-Datetime.
TimeGateLookup timegate_resolve(HttpTransport& transport, const NormalizedUrl& url, UtcTime desired,
                                const ArchiveEndpoint& endpoint, const RetryPolicy& retry = {});

}  // namespace linkaudit

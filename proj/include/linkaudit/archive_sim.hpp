#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkaudit/analyzer.hpp"
#include "linkaudit/corpus_ingest.hpp"
#include "linkaudit/memento.hpp"

namespace linkaudit {

enum class LiveDirective { Status, Timeout, Refuse };
enum class ArchiveFault { None, Timeout, Error };

struct SimResource {
  std::string url;
  LiveDirective directive = LiveDirective::Status;
  int live_status = 200;
  std::optional<std::string> redirect_to;
  std::vector<UtcTime> snapshots;
  std::chrono::milliseconds latency{0};
  /// HEAD answers 405 so the prober has to fall back to GET.
  bool head_not_allowed = false;
  ArchiveFault archive_fault = ArchiveFault::None;

  bool operator==(const SimResource&) const = default;
};

struct Scenario {
  std::vector<SimResource> resources;
  UtcTime clock{};
  std::string archive_host = "archive.sim";
  /// How long a "timeout" directive keeps the connection silent.
  std::chrono::milliseconds timeout_hold{3000};

  const SimResource* find(std::string_view url) const;
  bool operator==(const Scenario&) const = default;
};

/// Scenario files are JSON lines. An optional settings object
///   {"clock": "2011-06-01T00:00:00Z", "archive_host": "archive.sim", "timeout_hold_ms": 3000}
/// may appear once; every other line is a resource
///   {"url": "http://a.org/", "status": 200 | "timeout" | "refuse",
///    "redirect_to": "http://b.org/", "snapshots": ["2005-01-01T00:00:00Z", ...],
///    "latency_ms": 0, "head_not_allowed": false, "archive": "ok" | "timeout" | "error"}
/// Blank lines and lines starting with '#' are ignored.
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);

std::string memento_uri(std::string_view archive_host, UtcTime at, std::string_view url);
/// The TimeMap the simulator serves for `resource`.
TimeMap sim_timemap(const Scenario& scenario, const SimResource& resource);

struct RequestSpan {
  std::chrono::steady_clock::time_point start;
  std::chrono::steady_clock::time_point end;
};

struct SimStats {
  std::size_t requests = 0;
  /// Keyed by authority; the archive is keyed by its host name.
  std::map<std::string, unsigned> max_in_flight_per_host;
  /// Across all origin hosts (archive traffic excluded).
  unsigned max_in_flight_origin = 0;
  std::map<std::string, std::vector<RequestSpan>> spans;
};

class SimServer {
 public:
  /// Binds immediately; throws Error when the address is unusable.
  explicit SimServer(Scenario scenario, std::string_view bind_host = "127.0.0.1", std::uint16_t port = 0,
                     unsigned workers = 64);
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  void stop();
  std::uint16_t port() const;
  /// "host:port", usable as an HTTP proxy address.
  std::string address() const;
  std::string base_url() const;
  const Scenario& scenario() const;

  SimStats stats() const;
  void reset_stats();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `bind_address` is "host:port"; port 0 picks a free one.
std::unique_ptr<SimServer> serve(Scenario scenario, std::string_view bind_address);

class OracleError : public Error {
 public:
  using Error::Error;
};

/// Expected outcomes straight from the scenario data. Archive faults are
/// ignored: a faulted resource is expected as if its archive had answered.
std::vector<AuditOutcome> ground_truth(const Scenario& scenario, std::span<const CitationRecord> records);

}  // namespace linkaudit

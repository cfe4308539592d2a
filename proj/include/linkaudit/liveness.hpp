#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkaudit/http.hpp"
#include "linkaudit/normalizer.hpp"
#include "linkaudit/time.hpp"

namespace linkaudit {

enum class FailureKind { Timeout, ConnectionRefused, DnsFailure, TooManyRedirects };

std::string_view to_string(FailureKind kind);
std::optional<FailureKind> failure_kind_from_string(std::string_view text);

/// Liveness of one original URL. `reachable` holds exactly when a final
/// status was received and it is below 400; `failure_kind` is set exactly
/// when no final status was received.
struct ProbeResult {
  NormalizedUrl url;
  std::optional<int> final_status;
  int redirect_hops = 0;
  bool reachable = false;
  UtcTime checked_at{};
  std::optional<FailureKind> failure_kind;

  friend bool operator==(const ProbeResult&, const ProbeResult&) = default;
};

using Clock = std::function<UtcTime()>;

/// Wall clock truncated to seconds.
UtcTime system_now();

struct ProbeOptions {
  int max_redirects = 10;
  /// Extra attempts after a timeout.
  int timeout_retries = 1;
  Clock clock = system_now;
};

struct PolitenessPolicy {
  unsigned max_concurrency = 8;
  unsigned max_per_host = 1;
  /// Minimum pause between a response from a host and the next request to it.
  std::chrono::milliseconds per_host_delay{0};
};

/// Admission control for requests to one authority at a time.
class HostGate {
 public:
  HostGate(unsigned max_per_host, std::chrono::milliseconds delay);

  class Permit {
   public:
    Permit(Permit&& other) noexcept;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    friend class HostGate;
    Permit(HostGate* gate, std::string host) : gate_(gate), host_(std::move(host)) {}
    HostGate* gate_;
    std::string host_;
  };

  /// Blocks until a request to `host` may start.
  Permit acquire(const std::string& host);

 private:
  void release(const std::string& host);

  struct HostState {
    unsigned in_flight = 0;
    std::chrono::steady_clock::time_point next_allowed{};
  };

  unsigned max_per_host_;
  std::chrono::milliseconds delay_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, HostState> hosts_;
};

/// HEAD, falling back to GET on 405, following redirects up to the hop
/// limit. Never throws on network trouble; failures are reported in the
/// result. When `gate` is given every request passes through it.
ProbeResult probe(HttpTransport& transport, const NormalizedUrl& url, const ProbeOptions& options = {},
                  HostGate* gate = nullptr);

/// Probes all URLs under `policy`. Result i describes urls[i].
std::vector<ProbeResult> probe_batch(HttpTransport& transport, std::span<const NormalizedUrl> urls,
                                     const PolitenessPolicy& policy, const ProbeOptions& options = {});

}  // namespace linkaudit

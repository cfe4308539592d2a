#include "linkaudit/liveness.hpp"

#include <algorithm>
#include <deque>

#include "linkaudit/concurrency.hpp"

namespace linkaudit {
namespace {

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

FailureKind to_failure_kind(TransportFailure failure) {
  switch (failure) {
    case TransportFailure::Timeout: return FailureKind::Timeout;
    case TransportFailure::DnsFailure: return FailureKind::DnsFailure;
    case TransportFailure::ConnectionRefused: break;
  }
  return FailureKind::ConnectionRefused;
}

// One request through the gate, retrying timeouts.
TransportResult send_politely(HttpTransport& transport, const HttpRequest& request, int timeout_retries,
                              HostGate* gate) {
  const std::string host = authority_of(request.url);
  for (int attempt = 0;; ++attempt) {
    TransportResult result = [&] {
      if (!gate) return transport.send(request);
      auto permit = gate->acquire(host);
      return transport.send(request);
    }();
    const auto* failure = std::get_if<TransportFailure>(&result);
    if (!failure || *failure != TransportFailure::Timeout || attempt >= timeout_retries) return result;
  }
}

}  // namespace

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::Timeout: return "timeout";
    case FailureKind::ConnectionRefused: return "connection_refused";
    case FailureKind::DnsFailure: return "dns_failure";
    case FailureKind::TooManyRedirects: return "too_many_redirects";
  }
  return "unknown";
}

std::optional<FailureKind> failure_kind_from_string(std::string_view text) {
  for (auto kind : {FailureKind::Timeout, FailureKind::ConnectionRefused, FailureKind::DnsFailure,
                    FailureKind::TooManyRedirects})
    if (to_string(kind) == text) return kind;
  return std::nullopt;
}

UtcTime system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

HostGate::HostGate(unsigned max_per_host, std::chrono::milliseconds delay)
    : max_per_host_(std::max(1u, max_per_host)), delay_(delay) {}

HostGate::Permit::Permit(Permit&& other) noexcept
    : gate_(std::exchange(other.gate_, nullptr)), host_(std::move(other.host_)) {}

HostGate::Permit::~Permit() {
  if (gate_) gate_->release(host_);
}

HostGate::Permit HostGate::acquire(const std::string& host) {
  std::unique_lock lock(mutex_);
  while (true) {
    auto& state = hosts_[host];
    const auto now = std::chrono::steady_clock::now();
    if (state.in_flight < max_per_host_ && now >= state.next_allowed) {
      ++state.in_flight;
      return Permit(this, host);
    }
    if (state.in_flight < max_per_host_)
      cv_.wait_until(lock, state.next_allowed);
    else
      cv_.wait(lock);
  }
}

void HostGate::release(const std::string& host) {
  {
    std::lock_guard lock(mutex_);
    auto& state = hosts_[host];
    --state.in_flight;
    state.next_allowed = std::chrono::steady_clock::now() + delay_;
  }
  cv_.notify_all();
}

ProbeResult probe(HttpTransport& transport, const NormalizedUrl& url, const ProbeOptions& options,
                  HostGate* gate) {
  ProbeResult result;
  result.url = url;

  std::string current = url.str();
  for (int hops = 0;; ++hops) {
    HttpRequest request{"HEAD", current, {}, false};
    auto outcome = send_politely(transport, request, options.timeout_retries, gate);
    if (auto* response = std::get_if<HttpResponse>(&outcome); response && response->status == 405) {
      request.method = "GET";
      outcome = send_politely(transport, request, options.timeout_retries, gate);
    }
    if (auto* failure = std::get_if<TransportFailure>(&outcome)) {
      result.failure_kind = to_failure_kind(*failure);
      break;
    }
    const auto& response = std::get<HttpResponse>(outcome);
    const auto location = response.header("Location");
    if (is_redirect(response.status) && location) {
      if (hops >= options.max_redirects) {
        result.failure_kind = FailureKind::TooManyRedirects;
        break;
      }
      auto next = resolve_reference(current, *location);
      if (split_url(next)) {
        current = std::move(next);
        result.redirect_hops = hops + 1;
        continue;
      }
      // A redirect to something we cannot fetch ends the chain here.
    }
    result.final_status = response.status;
    break;
  }
  result.reachable = result.final_status && *result.final_status < 400;
  result.checked_at = options.clock();
  return result;
}

std::vector<ProbeResult> probe_batch(HttpTransport& transport, std::span<const NormalizedUrl> urls,
                                     const PolitenessPolicy& policy, const ProbeOptions& options) {
  std::vector<ProbeResult> results(urls.size());
  if (urls.empty()) return results;

  // Interleave hosts so workers rarely queue behind the same host.
  std::map<std::string, std::deque<std::size_t>> by_host;
  std::vector<std::string> host_order;
  for (std::size_t i = 0; i < urls.size(); ++i) {
    auto& queue = by_host[urls[i].host];
    if (queue.empty()) host_order.push_back(urls[i].host);
    queue.push_back(i);
  }
  std::vector<std::size_t> schedule;
  schedule.reserve(urls.size());
  while (schedule.size() < urls.size()) {
    for (const auto& host : host_order) {
      auto& queue = by_host[host];
      if (queue.empty()) continue;
      schedule.push_back(queue.front());
      queue.pop_front();
    }
  }

  HostGate gate(policy.max_per_host, policy.per_host_delay);
  parallel_for(schedule.size(), std::max(1u, policy.max_concurrency), [&](std::size_t k) {
    const auto i = schedule[k];
    results[i] = probe(transport, urls[i], options, &gate);
  });
  return results;
}

}  // namespace linkaudit

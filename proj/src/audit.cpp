#include "linkaudit/audit.hpp"

#include <algorithm>
#include <map>

#include "linkaudit/concurrency.hpp"

namespace linkaudit {

AuditResult run_audit(std::span<const CitationRecord> records, HttpTransport& origin, HttpTransport& archive,
                      const AuditConfig& config, const OutcomeSink& sink) {
  AuditResult result;
  if (records.empty()) return result;

  std::vector<NormalizedUrl> urls;
  std::map<std::string, std::vector<std::size_t>> records_of;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& list = records_of[records[i].url.str()];
    if (list.empty()) urls.push_back(records[i].url);
    list.push_back(i);
  }

  std::vector<std::optional<AuditOutcome>> outcomes(records.size());
  std::vector<std::size_t> failed;  // indexes into urls
  std::vector<FetchError> errors(urls.size());
  std::vector<ProbeResult> probes(urls.size());
  std::size_t succeeded = 0;

  const auto fetch = [&](std::size_t u) -> TimeMapLookup {
    return fetch_timemap(archive, urls[u], config.endpoint, config.retry);
  };

  const auto settle = [&](std::size_t u, const TimeMapLookup& lookup, std::vector<AuditOutcome>& batch) {
    if (const auto* error = std::get_if<FetchError>(&lookup)) {
      errors[u] = *error;
      return false;
    }
    std::optional<TimeMap> timemap;
    if (const auto* tm = std::get_if<TimeMap>(&lookup)) timemap = *tm;
    for (auto i : records_of[urls[u].str()]) {
      outcomes[i] = build_outcome(records[i], probes[u], timemap);
      batch.push_back(*outcomes[i]);
    }
    return true;
  };

  const auto emit = [&](std::vector<AuditOutcome>& batch) {
    if (sink && !batch.empty()) sink(batch);
  };

  const auto chunk = std::max<std::size_t>(1, config.chunk_size);
  for (std::size_t begin = 0; begin < urls.size(); begin += chunk) {
    const auto end = std::min(urls.size(), begin + chunk);
    const std::span<const NormalizedUrl> part(urls.data() + begin, end - begin);

    auto part_probes = probe_batch(origin, part, config.politeness, config.probe);
    std::move(part_probes.begin(), part_probes.end(), probes.begin() + static_cast<std::ptrdiff_t>(begin));

    std::vector<TimeMapLookup> lookups(part.size(), TimeMapLookup{NotArchived{}});
    parallel_for(part.size(), config.archive_concurrency, [&](std::size_t k) { lookups[k] = fetch(begin + k); });

    std::vector<AuditOutcome> batch;
    for (std::size_t k = 0; k < part.size(); ++k) {
      if (settle(begin + k, lookups[k], batch))
        ++succeeded;
      else
        failed.push_back(begin + k);
    }
    emit(batch);
  }

  // Second pass for transient archive failures. Skipped when nothing has
  // worked at all and no request even reached an HTTP server.
  const bool endpoint_dead = succeeded == 0 && std::none_of(failed.begin(), failed.end(), [&](std::size_t u) {
                               return errors[u].last_status.has_value();
                             });
  if (!failed.empty() && !endpoint_dead) {
    std::vector<TimeMapLookup> lookups(failed.size(), TimeMapLookup{NotArchived{}});
    parallel_for(failed.size(), config.archive_concurrency, [&](std::size_t k) { lookups[k] = fetch(failed[k]); });
    std::vector<AuditOutcome> batch;
    std::vector<std::size_t> still_failed;
    for (std::size_t k = 0; k < failed.size(); ++k) {
      if (settle(failed[k], lookups[k], batch))
        ++succeeded;
      else
        still_failed.push_back(failed[k]);
    }
    emit(batch);
    failed = std::move(still_failed);
  }

  if (succeeded == 0) {
    const auto& first = errors[failed.front()];
    throw NetworkAbort("no TimeMap lookup succeeded for any of " + std::to_string(urls.size()) +
                       " URLs; check the archive endpoint (first error: " + first.detail + ")");
  }

  for (auto& o : outcomes)
    if (o) result.outcomes.push_back(std::move(*o));
  for (auto u : failed) result.fetch_failures.push_back({urls[u], errors[u]});
  return result;
}

}  // namespace linkaudit

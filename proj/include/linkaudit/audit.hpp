#pragma once

#include <functional>
#include <span>
#include <vector>

#include "linkaudit/analyzer.hpp"
#include "linkaudit/liveness.hpp"
#include "linkaudit/memento.hpp"

namespace linkaudit {

struct AuditConfig {
  ArchiveEndpoint endpoint;
  RetryPolicy retry;
  PolitenessPolicy politeness;
  ProbeOptions probe;
  /// Parallel TimeMap fetches against the archive endpoint.
  unsigned archive_concurrency = 4;
  /// Distinct URLs handled per round; outcomes are emitted after each one.
  std::size_t chunk_size = 500;
};

struct FetchFailure {
  NormalizedUrl url;
  FetchError error;
};

struct AuditResult {
  /// Record order; records whose TimeMap could not be fetched are absent.
  std::vector<AuditOutcome> outcomes;
  /// URLs still failing after the second pass.
  std::vector<FetchFailure> fetch_failures;
};

/// Receives outcomes as soon as each chunk (or the retry pass) completes.
using OutcomeSink = std::function<void(std::span<const AuditOutcome>)>;

/// Probes and fetches each distinct URL once, then joins back to records.
/// Throws NetworkAbort when not a single TimeMap lookup succeeded.
AuditResult run_audit(std::span<const CitationRecord> records, HttpTransport& origin, HttpTransport& archive,
                      const AuditConfig& config, const OutcomeSink& sink = {});

}  // namespace linkaudit

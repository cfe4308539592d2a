#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "linkaudit/analyzer.hpp"
#include "linkaudit/archive_sim.hpp"
#include "linkaudit/audit.hpp"
#include "linkaudit/corpus_ingest.hpp"

namespace linkaudit::testing {

using Counts = std::array<std::size_t, 4>;  // kAllClasses order

NormalizedUrl url(std::string_view canonical);
Date day(std::string_view iso);
UtcTime at(std::string_view iso_datetime);

CitationRecord record(std::string_view url, std::string paper_id, std::string_view date = "2010-01-01",
                      std::vector<std::string> subjects = {});

/// Outcome of the given class; archived ones get a closest memento
/// `delta` days from a 2010-01-01 publication (default 0).
AuditOutcome outcome(AvailabilityClass cls, std::optional<std::int64_t> delta = std::nullopt,
                     std::vector<std::string> subjects = {}, std::string paper_id = "p");

/// counts[i] outcomes of kAllClasses[i], distinct URLs.
std::vector<AuditOutcome> outcomes_with_counts(const Counts& counts, std::vector<std::string> subjects = {});

/// Random outcomes over a few subjects, for recount oracles.
std::vector<AuditOutcome> random_outcomes(std::size_t n, std::mt19937_64& rng);

/// 25 archived outcomes: 12 with |delta| <= 31, 20 with |delta| <= 365,
/// mean |delta| 224.
std::vector<AuditOutcome> window_fixture();

struct GeneratedCorpus {
  std::vector<DocumentSource> docs;
  std::size_t pairs = 0;
  std::size_t distinct_urls = 0;
};

/// Documents whose links, once normalized, give exactly `pairs`
/// (url, paper) combinations over `distinct` URLs. Links are spread
/// across markup and text and include variants that normalize together.
GeneratedCorpus build_corpus(std::size_t pairs, std::size_t distinct, std::uint64_t seed);

struct GeneratedScenario {
  Scenario scenario;
  std::vector<std::string> raw_urls;  // as cited, before normalization
  std::vector<CitationRecord> records;
  Counts planted{};
};

struct ScenarioShape {
  Counts counts{400, 300, 100, 200};
  std::size_t hosts = 60;
  /// Records whose origin never answers (each costs two client timeouts).
  std::size_t origin_timeouts = 0;
  std::uint64_t seed = 1;
};

/// Scenario plus records with planted class proportions, covering
/// redirects, HEAD rejection, refusals, redirect limits and memento ties.
GeneratedScenario generate_scenario(const ScenarioShape& shape);

struct SimAudit {
  AuditConfig config;
  std::chrono::milliseconds client_timeout{2000};
};

/// Runs the real pipeline against `server`: origins through it as a
/// proxy, TimeMaps from its archive routes.
AuditResult audit_against(const SimServer& server, std::span<const CitationRecord> records,
                          const SimAudit& setup = {});

/// Short retry budget so fault tests stay fast.
RetryPolicy quick_retry();

Counts recount(std::span<const AuditOutcome> outcomes);

}  // namespace linkaudit::testing

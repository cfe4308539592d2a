#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "linkaudit/corpus_ingest.hpp"
#include "linkaudit/liveness.hpp"
#include "linkaudit/memento.hpp"

namespace linkaudit {

/// Quadrant of the live/archived grid.
enum class AvailabilityClass {
  LiveArchived,    // still exists and is archived
  LiveUnarchived,  // at risk of disappearing
  GoneArchived,    // gone, but preserved in an archive
  GoneUnarchived,  // lost
};

inline constexpr AvailabilityClass kAllClasses[] = {
    AvailabilityClass::LiveArchived, AvailabilityClass::LiveUnarchived,
    AvailabilityClass::GoneArchived, AvailabilityClass::GoneUnarchived};

/// Fixed tokens used in outcome files: "live_archived", "live_unarchived",
/// "gone_archived", "gone_unarchived".
std::string_view to_token(AvailabilityClass c);
std::optional<AvailabilityClass> class_from_token(std::string_view token);

AvailabilityClass classify(bool reachable, bool archived);

struct ClosestMemento {
  Memento memento;
  /// archived_at minus publication midnight, floored to whole days.
  std::int64_t delta_days;
};

/// The Memento nearest to midnight UTC of `publication`; equal distances go
/// to the earlier capture. `timemap.mementos` must be non-empty and sorted.
ClosestMemento closest_memento(const TimeMap& timemap, Date publication);

/// One citation joined with its liveness and archive evidence.
struct AuditOutcome {
  CitationRecord record;
  bool reachable = false;
  bool archived = false;
  std::optional<Memento> closest;
  std::optional<std::int64_t> delta_days;
  AvailabilityClass availability = AvailabilityClass::GoneUnarchived;

  friend bool operator==(const AuditOutcome&, const AuditOutcome&) = default;
};

/// `timemap` is nullopt for NotArchived. An empty TimeMap also counts as not
/// archived. Throws IntegrityError when the evidence is about another URL.
AuditOutcome build_outcome(const CitationRecord& record, const ProbeResult& probe,
                           const std::optional<TimeMap>& timemap);

/// Scheme/host case, default port and empty path insensitive comparison,
/// used to match an archive's original URI against the cited URL.
bool same_resource(std::string_view a, std::string_view b);

}  // namespace linkaudit

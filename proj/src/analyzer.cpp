#include "linkaudit/analyzer.hpp"

#include <algorithm>
#include <stdexcept>

#include "linkaudit/text.hpp"

namespace linkaudit {

std::string_view to_token(AvailabilityClass c) {
  switch (c) {
    case AvailabilityClass::LiveArchived: return "live_archived";
    case AvailabilityClass::LiveUnarchived: return "live_unarchived";
    case AvailabilityClass::GoneArchived: return "gone_archived";
    case AvailabilityClass::GoneUnarchived: return "gone_unarchived";
  }
  return "unknown";
}

std::optional<AvailabilityClass> class_from_token(std::string_view token) {
  for (auto c : kAllClasses)
    if (to_token(c) == token) return c;
  return std::nullopt;
}

AvailabilityClass classify(bool reachable, bool archived) {
  if (reachable) return archived ? AvailabilityClass::LiveArchived : AvailabilityClass::LiveUnarchived;
  return archived ? AvailabilityClass::GoneArchived : AvailabilityClass::GoneUnarchived;
}

ClosestMemento closest_memento(const TimeMap& timemap, Date publication) {
  const auto& list = timemap.mementos;
  if (list.empty()) throw std::invalid_argument("closest_memento: TimeMap has no mementos");
  const UtcTime target = midnight(publication);
  const auto by_time = [](const Memento& m, UtcTime t) { return m.archived_at < t; };

  // First capture at or after the target, and the first capture of the
  // latest instant before it.
  const auto after = std::lower_bound(list.begin(), list.end(), target, by_time);
  auto best = after;
  if (after != list.begin()) {
    const auto before = std::lower_bound(list.begin(), after, std::prev(after)->archived_at, by_time);
    if (after == list.end() || target - before->archived_at <= after->archived_at - target) best = before;
  }
  return ClosestMemento{*best, floor_days_between(target, best->archived_at)};
}

bool same_resource(std::string_view a, std::string_view b) {
  const auto pa = split_url(a);
  const auto pb = split_url(b);
  if (!pa || !pb) return a == b;
  return pa->scheme == pb->scheme && pa->host == pb->host && pa->port == pb->port && pa->target == pb->target;
}

AuditOutcome build_outcome(const CitationRecord& record, const ProbeResult& probe,
                           const std::optional<TimeMap>& timemap) {
  const auto url = record.url.str();
  if (!(probe.url == record.url))
    throw IntegrityError("probe for " + probe.url.str() + " joined with record for " + url);
  if (timemap && !same_resource(timemap->original_uri, url))
    throw IntegrityError("TimeMap of " + timemap->original_uri + " joined with record for " + url);

  AuditOutcome out;
  out.record = record;
  out.reachable = probe.reachable;
  out.archived = timemap && !timemap->mementos.empty();
  if (out.archived) {
    auto closest = closest_memento(*timemap, record.publication_date.day);
    out.closest = std::move(closest.memento);
    out.delta_days = closest.delta_days;
  }
  out.availability = classify(out.reachable, out.archived);
  return out;
}

}  // namespace linkaudit

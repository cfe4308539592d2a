#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace linkaudit {

/// All instants are UTC with second precision.
using UtcTime = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

enum class DatePrecision { Day, Month };

/// A repository publication date. Metadata that only carries a year and month
/// is pinned to the first of the month and flagged as reduced precision.
struct PublicationDate {
  Date day{};
  DatePrecision precision = DatePrecision::Day;

  friend bool operator==(const PublicationDate&, const PublicationDate&) = default;
};

/// Accepts "YYYY-MM-DD" or "YYYY-MM".
std::optional<PublicationDate> parse_publication_date(std::string_view text);

/// "YYYY-MM-DD"
std::string format_iso_date(Date day);

/// Accepts "YYYY-MM-DDThh:mm:ssZ" only.
std::optional<UtcTime> parse_iso_datetime(std::string_view text);
std::string format_iso_datetime(UtcTime t);

/// RFC 1123 dates as used by HTTP and Memento headers, e.g.
/// "Wed, 01 Jun 2005 00:00:00 GMT". Only the GMT zone is accepted.
std::optional<UtcTime> parse_http_date(std::string_view text);
std::string format_http_date(UtcTime t);

/// 14-digit archive timestamp "YYYYMMDDhhmmss".
std::string format_compact_timestamp(UtcTime t);
std::optional<UtcTime> parse_compact_timestamp(std::string_view text);

inline UtcTime midnight(Date day) { return UtcTime{day}; }

/// Signed whole days from `from` to `to`, rounded toward negative infinity.
std::int64_t floor_days_between(UtcTime from, UtcTime to);

}  // namespace linkaudit

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkaudit/analyzer.hpp"

namespace linkaudit {

/// 100 * part / whole, rounded half-up to one decimal.
double percent_one_decimal(std::size_t part, std::size_t whole);

struct QuadrantSummary {
  std::size_t total = 0;
  /// Indexed by AvailabilityClass.
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> percent{};
  /// Live or archived or both.
  double available_percent = 0;
  double live_percent = 0;
  double archived_percent = 0;

  std::size_t count(AvailabilityClass c) const { return counts[static_cast<std::size_t>(c)]; }
  double percent_of(AvailabilityClass c) const { return percent[static_cast<std::size_t>(c)]; }
  std::size_t archived_count() const;
};

/// Throws EmptyDataset for an empty list.
QuadrantSummary quadrant_percentages(std::span<const AuditOutcome> outcomes);

/// Share of ARCHIVED outcomes with |delta_days| <= window_days. Throws
/// EmptyDataset when nothing is archived, std::invalid_argument when
/// window_days <= 0.
double within_window_percent(std::span<const AuditOutcome> outcomes, int window_days);

/// Mean |delta_days| over archived outcomes, rounded half-up to one decimal.
double mean_abs_delta(std::span<const AuditOutcome> outcomes);

struct GroupSummary {
  std::string group_key;
  QuadrantSummary quadrant;
  /// Share of the group's outcomes (not of its archived ones) whose closest
  /// Memento lies within the window, so month <= year <= archived percent.
  double archived_within_month_percent = 0;
  double archived_within_year_percent = 0;
  /// Absent when nothing in the group is archived.
  std::optional<double> mean_abs_delta_days;
};

struct Windows {
  int month_days = 31;
  int year_days = 365;
};

using GroupKeyFn = std::function<std::vector<std::string>(const AuditOutcome&)>;

/// One summary per distinct key, largest total first (ties by key). An
/// outcome with k keys contributes to k groups.
std::vector<GroupSummary> group_summaries(std::span<const AuditOutcome> outcomes, const GroupKeyFn& key_fn,
                                          Windows windows = {});

/// Groups by the record's subjects.
std::vector<std::string> subject_keys(const AuditOutcome& outcome);

enum class HistogramScale { LinearDays, LogLog };

struct HistogramBin {
  /// Half-open [lower, upper) in days of |delta|.
  std::int64_t lower_days;
  std::int64_t upper_days;
  std::size_t count;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct DelayHistogram {
  HistogramScale scale = HistogramScale::LogLog;
  std::vector<HistogramBin> bins;
};

/// LinearDays: one bin per day 0..max. LogLog: [2^k, 2^(k+1)) for k = 0..K,
/// with the first bin widened to [0, 2) when zero deltas are present.
DelayHistogram delay_histogram(std::span<const AuditOutcome> outcomes, HistogramScale scale);

struct Report {
  QuadrantSummary overall;
  Windows windows;
  std::optional<double> within_month_percent;
  std::optional<double> within_year_percent;
  std::optional<double> mean_abs_delta_days;
  DelayHistogram histogram;
  /// Empty unless grouping was requested.
  std::vector<GroupSummary> groups;
};

/// Throws EmptyDataset for an empty list. Window statistics are absent when
/// nothing is archived.
Report build_report(std::span<const AuditOutcome> outcomes, bool group_by_subject, Windows windows = {});

enum class ReportFormat { Csv, Json, PlotData };

/// "csv", "json" or "plot-data"; throws UsageError otherwise.
ReportFormat parse_report_format(std::string_view token);

/// Byte-stable rendering. csv is long-form section,group,metric,value rows;
/// plot-data is "log10(days) log10(count)" pairs of the log-log histogram.
std::string render_report(const Report& report, ReportFormat format);

/// Header plus one row per class.
std::string render_quadrant_csv(const QuadrantSummary& summary);

}  // namespace linkaudit

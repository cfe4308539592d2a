#include "linkaudit/reporting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "linkaudit/errors.hpp"

namespace linkaudit {
namespace {

std::uint64_t abs_days(std::int64_t d) {
  return d < 0 ? static_cast<std::uint64_t>(-(d + 1)) + 1 : static_cast<std::uint64_t>(d);
}

std::size_t index_of(AvailabilityClass c) { return static_cast<std::size_t>(c); }

QuadrantSummary summarize(std::span<const AuditOutcome> outcomes) {
  QuadrantSummary q;
  q.total = outcomes.size();
  for (const auto& o : outcomes) ++q.counts[index_of(o.availability)];
  for (std::size_t i = 0; i < 4; ++i) q.percent[i] = percent_one_decimal(q.counts[i], q.total);
  const auto lost = q.count(AvailabilityClass::GoneUnarchived);
  const auto live = q.count(AvailabilityClass::LiveArchived) + q.count(AvailabilityClass::LiveUnarchived);
  q.available_percent = percent_one_decimal(q.total - lost, q.total);
  q.live_percent = percent_one_decimal(live, q.total);
  q.archived_percent = percent_one_decimal(q.archived_count(), q.total);
  return q;
}

std::size_t count_within(std::span<const AuditOutcome> outcomes, int window_days) {
  return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [&](const AuditOutcome& o) {
    return o.delta_days && abs_days(*o.delta_days) <= static_cast<std::uint64_t>(window_days);
  }));
}

std::optional<double> mean_abs_delta_or_none(std::span<const AuditOutcome> outcomes) {
  std::uint64_t sum = 0, n = 0;
  for (const auto& o : outcomes) {
    if (!o.delta_days) continue;
    sum += abs_days(*o.delta_days);
    ++n;
  }
  if (n == 0) return std::nullopt;
  const auto tenths = (20 * sum + n) / (2 * n);
  return static_cast<double>(tenths) / 10.0;
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string_view scale_token(HistogramScale s) { return s == HistogramScale::LogLog ? "loglog" : "linear"; }

using ordered_json = nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json quadrant_json(const QuadrantSummary& q) {
  ordered_json counts = ordered_json::object(), percent = ordered_json::object();
  for (auto c : kAllClasses) {
    counts[std::string(to_token(c))] = q.count(c);
    percent[std::string(to_token(c))] = q.percent_of(c);
  }
  return ordered_json{{"total", q.total},
                      {"counts", counts},
                      {"percent", percent},
                      {"available_percent", q.available_percent},
                      {"live_percent", q.live_percent},
                      {"archived_percent", q.archived_percent}};
}

void quadrant_rows(std::string& out, std::string_view section, std::string_view group, const QuadrantSummary& q) {
  const auto row = [&](std::string_view metric, const std::string& value) {
    out += std::string(section) + "," + csv_field(group) + "," + std::string(metric) + "," + value + "\n";
  };
  row("total", std::to_string(q.total));
  for (auto c : kAllClasses) row(std::string(to_token(c)) + "_count", std::to_string(q.count(c)));
  for (auto c : kAllClasses) row(std::string(to_token(c)) + "_percent", fixed1(q.percent_of(c)));
  row("available_percent", fixed1(q.available_percent));
  row("live_percent", fixed1(q.live_percent));
  row("archived_percent", fixed1(q.archived_percent));
}

std::string render_json(const Report& r) {
  ordered_json doc;
  doc["overall"] = quadrant_json(r.overall);
  doc["windows"] = ordered_json{{"month_days", r.windows.month_days},
                                {"year_days", r.windows.year_days},
                                {"within_month_percent", optional_number(r.within_month_percent)},
                                {"within_year_percent", optional_number(r.within_year_percent)},
                                {"mean_abs_delta_days", optional_number(r.mean_abs_delta_days)}};
  ordered_json bins = ordered_json::array();
  for (const auto& b : r.histogram.bins)
    bins.push_back(ordered_json{{"lower_days", b.lower_days}, {"upper_days", b.upper_days}, {"count", b.count}});
  doc["histogram"] = ordered_json{{"scale", scale_token(r.histogram.scale)}, {"bins", bins}};
  ordered_json groups = ordered_json::array();
  for (const auto& g : r.groups) {
    groups.push_back(ordered_json{{"key", g.group_key},
                                  {"quadrant", quadrant_json(g.quadrant)},
                                  {"archived_within_month_percent", g.archived_within_month_percent},
                                  {"archived_within_year_percent", g.archived_within_year_percent},
                                  {"mean_abs_delta_days", optional_number(g.mean_abs_delta_days)}});
  }
  doc["groups"] = groups;
  return doc.dump(2) + "\n";
}

std::string render_csv(const Report& r) {
  std::string out = "section,group,metric,value\n";
  quadrant_rows(out, "overall", "", r.overall);
  const auto opt = [](const std::optional<double>& v) { return v ? fixed1(*v) : std::string{}; };
  out += "windows,,month_days," + std::to_string(r.windows.month_days) + "\n";
  out += "windows,,year_days," + std::to_string(r.windows.year_days) + "\n";
  out += "windows,,within_month_percent," + opt(r.within_month_percent) + "\n";
  out += "windows,,within_year_percent," + opt(r.within_year_percent) + "\n";
  out += "windows,,mean_abs_delta_days," + opt(r.mean_abs_delta_days) + "\n";
  for (const auto& b : r.histogram.bins)
    out += "histogram," + std::to_string(b.lower_days) + "-" + std::to_string(b.upper_days) + ",count," +
           std::to_string(b.count) + "\n";
  for (const auto& g : r.groups) {
    quadrant_rows(out, "group", g.group_key, g.quadrant);
    out += "group," + csv_field(g.group_key) + ",archived_within_month_percent," +
           fixed1(g.archived_within_month_percent) + "\n";
    out += "group," + csv_field(g.group_key) + ",archived_within_year_percent," +
           fixed1(g.archived_within_year_percent) + "\n";
    out += "group," + csv_field(g.group_key) + ",mean_abs_delta_days," + opt(g.mean_abs_delta_days) + "\n";
  }
  return out;
}

std::string render_plot_data(const Report& r) {
  std::string out = "# log10(days) log10(count)\n";
  for (const auto& b : r.histogram.bins) {
    if (b.count == 0) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f %.6f\n", std::log10(static_cast<double>(std::max<std::int64_t>(b.lower_days, 1))),
                  std::log10(static_cast<double>(b.count)));
    out += buf;
  }
  return out;
}

}  // namespace

double percent_one_decimal(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0.0;
  const std::uint64_t tenths = (2000 * static_cast<std::uint64_t>(part) + whole) / (2 * static_cast<std::uint64_t>(whole));
  return static_cast<double>(tenths) / 10.0;
}

std::size_t QuadrantSummary::archived_count() const {
  return count(AvailabilityClass::LiveArchived) + count(AvailabilityClass::GoneArchived);
}

QuadrantSummary quadrant_percentages(std::span<const AuditOutcome> outcomes) {
  if (outcomes.empty()) throw EmptyDataset("no outcomes to summarize");
  return summarize(outcomes);
}

double within_window_percent(std::span<const AuditOutcome> outcomes, int window_days) {
  if (window_days <= 0) throw std::invalid_argument("window_days must be positive");
  const auto archived = static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const AuditOutcome& o) { return o.delta_days.has_value(); }));
  if (archived == 0) throw EmptyDataset("no archived outcomes");
  return percent_one_decimal(count_within(outcomes, window_days), archived);
}

double mean_abs_delta(std::span<const AuditOutcome> outcomes) {
  const auto mean = mean_abs_delta_or_none(outcomes);
  if (!mean) throw EmptyDataset("no archived outcomes");
  return *mean;
}

std::vector<std::string> subject_keys(const AuditOutcome& outcome) { return outcome.record.subjects; }

std::vector<GroupSummary> group_summaries(std::span<const AuditOutcome> outcomes, const GroupKeyFn& key_fn,
                                          Windows windows) {
  std::map<std::string, std::vector<AuditOutcome>> members;
  for (const auto& o : outcomes) {
    auto keys = key_fn(o);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto& k : keys) members[std::move(k)].push_back(o);
  }
  std::vector<GroupSummary> out;
  for (const auto& [key, list] : members) {
    GroupSummary g;
    g.group_key = key;
    g.quadrant = summarize(list);
    g.archived_within_month_percent = percent_one_decimal(count_within(list, windows.month_days), list.size());
    g.archived_within_year_percent = percent_one_decimal(count_within(list, windows.year_days), list.size());
    g.mean_abs_delta_days = mean_abs_delta_or_none(list);
    out.push_back(std::move(g));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GroupSummary& a, const GroupSummary& b) { return a.quadrant.total > b.quadrant.total; });
  return out;
}

DelayHistogram delay_histogram(std::span<const AuditOutcome> outcomes, HistogramScale scale) {
  std::vector<std::uint64_t> deltas;
  for (const auto& o : outcomes)
    if (o.delta_days) deltas.push_back(abs_days(*o.delta_days));
  if (deltas.empty()) throw EmptyDataset("no archived outcomes");

  DelayHistogram h;
  h.scale = scale;
  const auto max = *std::max_element(deltas.begin(), deltas.end());
  if (scale == HistogramScale::LinearDays) {
    h.bins.resize(max + 1);
    for (std::uint64_t d = 0; d <= max; ++d)
      h.bins[d] = HistogramBin{static_cast<std::int64_t>(d), static_cast<std::int64_t>(d + 1), 0};
    for (auto d : deltas) ++h.bins[d].count;
    return h;
  }
  const auto bin_of = [](std::uint64_t d) -> std::size_t { return d == 0 ? 0 : std::bit_width(d) - 1; };
  const auto top = bin_of(max);
  for (std::size_t k = 0; k <= top; ++k)
    h.bins.push_back(HistogramBin{std::int64_t{1} << k, std::int64_t{1} << (k + 1), 0});
  bool has_zero = false;
  for (auto d : deltas) {
    ++h.bins[bin_of(d)].count;
    has_zero = has_zero || d == 0;
  }
  if (has_zero) h.bins.front().lower_days = 0;
  return h;
}

Report build_report(std::span<const AuditOutcome> outcomes, bool group_by_subject, Windows windows) {
  Report r;
  r.overall = quadrant_percentages(outcomes);
  r.windows = windows;
  if (r.overall.archived_count() > 0) {
    r.within_month_percent = within_window_percent(outcomes, windows.month_days);
    r.within_year_percent = within_window_percent(outcomes, windows.year_days);
    r.mean_abs_delta_days = mean_abs_delta(outcomes);
    r.histogram = delay_histogram(outcomes, HistogramScale::LogLog);
  }
  if (group_by_subject) r.groups = group_summaries(outcomes, subject_keys, windows);
  return r;
}

ReportFormat parse_report_format(std::string_view token) {
  if (token == "csv") return ReportFormat::Csv;
  if (token == "json") return ReportFormat::Json;
  if (token == "plot-data") return ReportFormat::PlotData;
  throw UsageError("unknown report format '" + std::string(token) + "' (expected csv, json or plot-data)");
}

std::string render_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::PlotData: return render_plot_data(report);
  }
  throw UsageError("unknown report format");
}

std::string render_quadrant_csv(const QuadrantSummary& q) {
  std::string out = "class,count,percent\n";
  for (auto c : kAllClasses)
    out += std::string(to_token(c)) + "," + std::to_string(q.count(c)) + "," + fixed1(q.percent_of(c)) + "\n";
  return out;
}

}  // namespace linkaudit

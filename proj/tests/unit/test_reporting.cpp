#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <json.hpp>

#include "fixtures.hpp"
#include "linkaudit/errors.hpp"
#include "linkaudit/reporting.hpp"

using namespace linkaudit;
using namespace linkaudit::testing;

namespace {

using AC = AvailabilityClass;

std::vector<AuditOutcome> archived_with(std::vector<std::int64_t> deltas) {
  std::vector<AuditOutcome> out;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    out.push_back(outcome(AC::LiveArchived, deltas[i], {}, "d" + std::to_string(i)));
  return out;
}

// Independent recomputation with floating point, rounded half-up.
double naive_percent(std::size_t part, std::size_t whole) {
  return std::floor(1000.0 * static_cast<double>(part) / static_cast<double>(whole) + 0.5 + 1e-9) / 10.0;
}

}  // namespace

TEST_SUITE("reporting") {
  TEST_CASE("rounding") {
    CHECK(percent_one_decimal(1, 3) == 33.3);
    CHECK(percent_one_decimal(2, 3) == 66.7);
    CHECK(percent_one_decimal(1, 8) == 12.5);
    CHECK(percent_one_decimal(1, 16) == 6.3);  // 6.25 rounds up
    CHECK(percent_one_decimal(0, 5) == 0.0);
    CHECK(percent_one_decimal(5, 5) == 100.0);
  }

  TEST_CASE("quadrants of the UNT shape") {
    const auto q = quadrant_percentages(outcomes_with_counts({27, 18, 27, 28}));
    CHECK(q.total == 100);
    CHECK(q.available_percent == 72.0);
    CHECK(q.percent_of(AC::GoneUnarchived) == 28.0);
    CHECK(q.archived_percent == 54.0);
    CHECK(q.live_percent == 45.0);
  }

  TEST_CASE("all live and archived") {
    const auto q = quadrant_percentages(outcomes_with_counts({7, 0, 0, 0}));
    CHECK(q.percent_of(AC::LiveArchived) == 100.0);
    CHECK(q.percent_of(AC::LiveUnarchived) == 0.0);
    CHECK(q.available_percent == 100.0);
    CHECK_THROWS_AS(quadrant_percentages({}), EmptyDataset);
  }

  TEST_CASE("quadrants equal a naive recount") {
    std::mt19937_64 rng(99);
    auto outcomes = random_outcomes(1000, rng);
    const auto q = quadrant_percentages(outcomes);
    const auto c = recount(outcomes);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(q.counts[i] == c[i]);
      CHECK(q.percent[i] == naive_percent(c[i], 1000));
      sum += q.counts[i];
    }
    CHECK(sum == q.total);
    CHECK(q.available_percent == naive_percent(c[0] + c[1] + c[2], 1000));

    std::shuffle(outcomes.begin(), outcomes.end(), rng);
    const auto again = quadrant_percentages(outcomes);
    CHECK(again.counts == q.counts);
    CHECK(again.percent == q.percent);
  }

  TEST_CASE("windows") {
    const auto four = archived_with({5, -20, 40, -400});
    CHECK(within_window_percent(four, 31) == 50.0);
    CHECK(within_window_percent(four, 365) == 75.0);
    CHECK_THROWS_AS(within_window_percent(four, 0), std::invalid_argument);
    CHECK_THROWS_AS(within_window_percent(outcomes_with_counts({0, 3, 0, 2}), 31), EmptyDataset);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
      const auto outcomes = random_outcomes(200, rng);
      CHECK(within_window_percent(outcomes, 31) <= within_window_percent(outcomes, 365));
    }
  }

  TEST_CASE("window fixture") {
    const auto w = window_fixture();
    CHECK(within_window_percent(w, 31) == 48.0);
    CHECK(within_window_percent(w, 365) == 80.0);
    CHECK(mean_abs_delta(w) == 224.0);
  }

  TEST_CASE("mean absolute delta") {
    CHECK(mean_abs_delta(archived_with({-10, 30})) == 20.0);
    CHECK(mean_abs_delta(archived_with({224})) == 224.0);
    CHECK(mean_abs_delta(archived_with({1, 2})) == 1.5);
    CHECK(mean_abs_delta(archived_with({0, 0, 1})) == 0.3);
    CHECK_THROWS_AS(mean_abs_delta(outcomes_with_counts({0, 1, 0, 0})), EmptyDataset);

    std::mt19937_64 rng(8);
    const auto outcomes = random_outcomes(1000, rng);
    double sum = 0;
    std::size_t n = 0;
    for (const auto& o : outcomes)
      if (o.delta_days) {
        sum += std::abs(static_cast<double>(*o.delta_days));
        ++n;
      }
    CHECK(mean_abs_delta(outcomes) == doctest::Approx(sum / static_cast<double>(n)).epsilon(0.0005));
  }

  TEST_CASE("groups") {
    std::vector<AuditOutcome> three{outcome(AC::LiveArchived, 1, {"math"}, "a"), outcome(AC::GoneUnarchived, {}, {"math"}, "b"),
                                    outcome(AC::LiveUnarchived, {}, {"cs"}, "c")};
    const auto g = group_summaries(three, subject_keys);
    REQUIRE(g.size() == 2);
    CHECK(g[0].group_key == "math");
    CHECK(g[0].quadrant.total == 2);
    CHECK(g[1].quadrant.total == 1);

    std::vector<AuditOutcome> both{outcome(AC::LiveArchived, 1, {"math", "cs"}, "x")};
    const auto g2 = group_summaries(both, subject_keys);
    CHECK(g2.size() == 2);
    CHECK(group_summaries(outcomes_with_counts({1, 1, 0, 0}), subject_keys).empty());
  }

  TEST_CASE("groups equal filter-then-recompute") {
    std::mt19937_64 rng(12);
    const auto outcomes = random_outcomes(1000, rng);
    const auto groups = group_summaries(outcomes, subject_keys);
    for (std::size_t i = 1; i < groups.size(); ++i) CHECK(groups[i - 1].quadrant.total >= groups[i].quadrant.total);
    for (const auto& g : groups) {
      std::vector<AuditOutcome> subset;
      std::copy_if(outcomes.begin(), outcomes.end(), std::back_inserter(subset), [&](const AuditOutcome& o) {
        return std::find(o.record.subjects.begin(), o.record.subjects.end(), g.group_key) != o.record.subjects.end();
      });
      const auto q = quadrant_percentages(subset);
      CHECK(g.quadrant.counts == q.counts);
      CHECK(g.quadrant.percent == q.percent);
      CHECK(g.quadrant.available_percent == q.available_percent);
      if (g.quadrant.archived_count()) CHECK(*g.mean_abs_delta_days == mean_abs_delta(subset));
      else CHECK_FALSE(g.mean_abs_delta_days);
      CHECK(g.archived_within_month_percent <= g.archived_within_year_percent);
      CHECK(g.archived_within_year_percent <= g.quadrant.archived_percent);
    }
  }

  TEST_CASE("single-subject groups sum to the dataset") {
    auto outcomes = outcomes_with_counts({10, 5, 3, 2});
    for (std::size_t i = 0; i < outcomes.size(); ++i) outcomes[i].record.subjects = {i % 3 ? "math" : "cs"};
    std::size_t total = 0;
    for (const auto& g : group_summaries(outcomes, subject_keys)) total += g.quadrant.total;
    CHECK(total == outcomes.size());
  }

  TEST_CASE("histograms") {
    const auto linear = delay_histogram(archived_with({0, 1, 1, 3}), HistogramScale::LinearDays);
    CHECK(linear.bins == std::vector<HistogramBin>{{0, 1, 1}, {1, 2, 2}, {2, 3, 0}, {3, 4, 1}});

    const auto log = delay_histogram(archived_with({1, 2, 3, 5, 9}), HistogramScale::LogLog);
    CHECK(log.bins == std::vector<HistogramBin>{{1, 2, 1}, {2, 4, 2}, {4, 8, 1}, {8, 16, 1}});

    const auto zero = delay_histogram(archived_with({0, -1, 2}), HistogramScale::LogLog);
    CHECK(zero.bins == std::vector<HistogramBin>{{0, 2, 2}, {2, 4, 1}});
    CHECK_THROWS_AS(delay_histogram(outcomes_with_counts({0, 2, 0, 0}), HistogramScale::LogLog), EmptyDataset);

    std::mt19937_64 rng(4);
    const auto outcomes = random_outcomes(1000, rng);
    const auto archived = recount(outcomes)[0] + recount(outcomes)[2];
    for (auto scale : {HistogramScale::LinearDays, HistogramScale::LogLog}) {
      const auto h = delay_histogram(outcomes, scale);
      std::size_t sum = 0;
      for (std::size_t i = 0; i < h.bins.size(); ++i) {
        sum += h.bins[i].count;
        CHECK(h.bins[i].lower_days < h.bins[i].upper_days);
        if (i) CHECK(h.bins[i].lower_days == h.bins[i - 1].upper_days);
      }
      CHECK(sum == archived);
    }
  }

  TEST_CASE("rendering") {
    const auto outcomes = outcomes_with_counts({27, 18, 27, 28}, {"history"});
    CHECK(render_quadrant_csv(quadrant_percentages(outcomes)) ==
          "class,count,percent\nlive_archived,27,27.0\nlive_unarchived,18,18.0\ngone_archived,27,27.0\n"
          "gone_unarchived,28,28.0\n");

    const auto report = build_report(outcomes, true);
    for (auto f : {ReportFormat::Csv, ReportFormat::Json, ReportFormat::PlotData})
      CHECK(render_report(report, f) == render_report(build_report(outcomes, true), f));

    const auto json = nlohmann::json::parse(render_report(report, ReportFormat::Json));
    CHECK(json["overall"]["available_percent"] == 72.0);
    CHECK(json["groups"].size() == 1);
    const auto csv = render_report(report, ReportFormat::Csv);
    CHECK(csv.find("overall,,available_percent,72.0\n") != std::string::npos);
    CHECK(csv.find("overall,,gone_unarchived_percent,28.0\n") != std::string::npos);

    const auto plot = render_report(build_report(archived_with({1, 2, 3, 5, 9}), false), ReportFormat::PlotData);
    CHECK(plot == "# log10(days) log10(count)\n0.000000 0.000000\n0.301030 0.301030\n0.602060 0.000000\n"
                  "0.903090 0.000000\n");

    CHECK(parse_report_format("plot-data") == ReportFormat::PlotData);
    CHECK_THROWS_AS(parse_report_format("xml"), UsageError);
  }
}

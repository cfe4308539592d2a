#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "linkaudit/archive_sim.hpp"
#include "linkaudit/audit.hpp"
#include "linkaudit/commands.hpp"
#include "linkaudit/errors.hpp"
#include "linkaudit/records_io.hpp"
#include "linkaudit/text.hpp"
#include "temp_dir.hpp"

using namespace linkaudit;
using namespace linkaudit::testing;
using namespace std::chrono_literals;

namespace {

SimAudit fast_setup() {
  SimAudit setup;
  setup.config.retry = quick_retry();
  setup.config.politeness = {16, 2, 0ms};
  setup.config.chunk_size = 40;
  setup.client_timeout = 1000ms;
  return setup;
}

std::size_t mismatches(std::span<const AuditOutcome> got, std::span<const AuditOutcome> want) {
  if (got.size() != want.size()) return std::max(got.size(), want.size());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const bool same = got[i].record == want[i].record && got[i].availability == want[i].availability &&
                      got[i].delta_days == want[i].delta_days &&
                      (got[i].closest ? got[i].closest->archived_at : UtcTime{}) ==
                          (want[i].closest ? want[i].closest->archived_at : UtcTime{});
    if (!same) {
      MESSAGE("mismatch for " << got[i].record.url.str());
      ++bad;
    }
  }
  return bad;
}

AuditOptions options_for(const SimServer& server, const TempDir& dir) {
  AuditOptions o;
  o.records = dir / "records.jsonl";
  o.out = dir / "outcomes.jsonl";
  o.config = fast_setup().config;
  o.config.endpoint.timemap_template = server.base_url() + "/timemap/link/{url}";
  o.config.endpoint.timegate_template = server.base_url() + "/timegate/{url}";
  o.config.probe.clock = [t = server.scenario().clock] { return t; };
  return o;
}

struct Transports {
  NetworkTransport origin;
  NetworkTransport archive;
  explicit Transports(const SimServer& server)
      : origin({.timeout = 1000ms, .proxy = server.address()}), archive({.timeout = 1000ms}) {}
};

}  // namespace

TEST_SUITE("audit") {
  TEST_CASE("small end to end matches ground truth") {
    const auto gen = generate_scenario({.counts = {40, 30, 10, 20}, .hosts = 12, .seed = 7});
    SimServer server(gen.scenario);
    const auto result = audit_against(server, gen.records, fast_setup());
    CHECK(result.fetch_failures.empty());
    CHECK(mismatches(result.outcomes, ground_truth(gen.scenario, gen.records)) == 0);
    CHECK(recount(result.outcomes) == gen.planted);
  }

  TEST_CASE("records sharing a url are probed once") {
    Scenario s;
    s.resources.push_back({.url = "http://a.org/", .snapshots = {at("2009-01-01T00:00:00Z")}});
    SimServer server(s);
    std::vector<CitationRecord> records{record("http://a.org/", "p1", "2009-01-01"),
                                        record("http://a.org/", "p2", "2009-01-11")};
    const auto result = audit_against(server, records, fast_setup());
    REQUIRE(result.outcomes.size() == 2);
    CHECK(result.outcomes[0].record.paper_id == "p1");
    CHECK(result.outcomes[0].delta_days == 0);
    CHECK(result.outcomes[1].delta_days == -10);
    // One HEAD and one TimeMap request.
    CHECK(server.stats().requests == 2);
  }

  TEST_CASE("archive faults become fetch failures") {
    Scenario s;
    s.timeout_hold = 3000ms;
    s.resources.push_back({.url = "http://ok.org/", .snapshots = {at("2009-01-01T00:00:00Z")}});
    s.resources.push_back({.url = "http://err.org/", .snapshots = {at("2009-01-01T00:00:00Z")},
                           .archive_fault = ArchiveFault::Error});
    s.resources.push_back({.url = "http://slow.org/", .snapshots = {at("2009-01-01T00:00:00Z")},
                           .archive_fault = ArchiveFault::Timeout});
    SimServer server(s);
    std::vector<CitationRecord> records{record("http://ok.org/", "p"), record("http://err.org/", "p"),
                                        record("http://slow.org/", "p")};
    auto setup = fast_setup();
    setup.client_timeout = 300ms;
    const auto result = audit_against(server, records, setup);
    REQUIRE(result.outcomes.size() == 1);
    CHECK(result.outcomes[0].record.url.str() == "http://ok.org/");
    REQUIRE(result.fetch_failures.size() == 2);
    for (const auto& f : result.fetch_failures) {
      if (f.url.str() == "http://err.org/") CHECK(f.error.last_status == 503);
      else CHECK(f.url.str() == "http://slow.org/");
      CHECK(f.error.attempts >= 2);
    }
  }

  TEST_CASE("unreachable archive aborts") {
    std::uint16_t dead_port = 0;
    {
      SimServer probe_port{Scenario{}};
      dead_port = probe_port.port();
    }
    Scenario s;
    s.resources.push_back({.url = "http://a.org/"});
    SimServer server(s);
    std::vector<CitationRecord> records{record("http://a.org/", "p")};
    NetworkTransport origin({.timeout = 1000ms, .proxy = server.address()});
    NetworkTransport archive({.timeout = 1000ms});
    AuditConfig config = fast_setup().config;
    config.endpoint.timemap_template = "http://127.0.0.1:" + std::to_string(dead_port) + "/timemap/link/{url}";
    CHECK_THROWS_AS(run_audit(records, origin, archive, config), NetworkAbort);

    TempDir dir;
    auto options = options_for(server, dir);
    options.config.endpoint.timemap_template = config.endpoint.timemap_template;
    std::ofstream(options.records) << format_citations(records);
    std::ostringstream out, err;
    const int code = run_command([&] { return cmd_audit(options, origin, archive, out, err); }, err);
    CHECK(code == kExitNetwork);
  }

  TEST_CASE("resume skips finished records") {
    const auto gen = generate_scenario({.counts = {10, 8, 4, 6}, .hosts = 6, .seed = 11});
    SimServer server(gen.scenario);
    Transports t(server);
    TempDir dir;
    auto options = options_for(server, dir);
    std::ofstream(options.records) << format_citations(gen.records);

    std::ostringstream out, err;
    REQUIRE(cmd_audit(options, t.origin, t.archive, out, err) == kExitOk);
    const auto full = read_file(options.out);
    CHECK(read_outcomes(options.out).outcomes.size() == gen.records.size());
    CHECK_FALSE(std::filesystem::exists(options.out.string() + ".fetch_errors.jsonl"));

    // Interrupted run: first half kept plus a torn line.
    const auto lines = split(full, '\n');
    std::string partial;
    for (std::size_t i = 0; i < gen.records.size() / 2; ++i) partial += std::string(lines[i]) + "\n";
    partial += std::string(lines[gen.records.size() / 2]).substr(0, 20);
    std::ofstream(options.out, std::ios::trunc) << partial;

    server.reset_stats();
    options.resume = true;
    std::ostringstream out2, err2;
    REQUIRE(cmd_audit(options, t.origin, t.archive, out2, err2) == kExitOk);
    CHECK(read_file(options.out) == full);
    CHECK(out2.str().find("resumed: " + std::to_string(gen.records.size() / 2) + "\n") != std::string::npos);
    CHECK(err2.str().find("truncated") != std::string::npos);

    // A completed run resumes to a no-op.
    server.reset_stats();
    std::ostringstream out3, err3;
    REQUIRE(cmd_audit(options, t.origin, t.archive, out3, err3) == kExitOk);
    CHECK(server.stats().requests == 0);
    CHECK(read_file(options.out) == full);
  }
}

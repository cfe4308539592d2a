#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "linkaudit/commands.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  using namespace linkaudit;

  CLI::App app{"Audit the persistence of URLs cited by scholarly papers against live origins and Memento archives"};
  app.set_config("--config", "", "TOML/INI file supplying any option below");
  app.require_subcommand(1);
  app.get_formatter()->column_width(40);

  // extract
  ExtractOptions extract;
  std::string manifest;
  auto* x = app.add_subcommand("extract", "Extract and normalize cited URLs into a record file");
  x->add_option("--corpus", extract.corpus_dir, "Directory holding paper bodies")->required();
  x->add_option("--manifest", manifest, "Paper metadata (JSON lines); default <corpus>/manifest.jsonl");
  x->add_option("--out", extract.out, "Record file to write")->required();
  x->add_option("--tlds", extract.tables.tld_file, "TLD list (one per line); default bundled list");
  x->add_option("--blacklist", extract.tables.blacklist_file, "Blacklist rules; default bundled rules");
  x->add_option("--threads", extract.threads, "Extraction workers")->capture_default_str();

  // audit
  AuditOptions audit;
  long long timeout_ms = 15000, backoff_ms = 1000, deadline_ms = 30000, delay_ms = 0;
  std::string proxy, archive_proxy;
  auto* a = app.add_subcommand("audit", "Probe liveness and fetch TimeMaps for every record");
  a->add_option("--records", audit.records, "Record file from extract")->required();
  a->add_option("--out", audit.out, "Outcome file to write")->required();
  a->add_option("--failures", audit.failures_out, "Where unresolved lookups go; default <out>.fetch_errors.jsonl");
  a->add_flag("--resume", audit.resume, "Keep outcomes already in --out and audit only the rest");
  a->add_option("--timemap-template", audit.config.endpoint.timemap_template,
                "TimeMap endpoint; {url} is replaced by the cited URL")->capture_default_str();
  a->add_option("--timegate-template", audit.config.endpoint.timegate_template, "TimeGate endpoint")
      ->capture_default_str();
  a->add_option("--proxy", proxy, "host:port HTTP proxy for origin probes");
  a->add_option("--archive-proxy", archive_proxy, "host:port HTTP proxy for archive requests");
  a->add_option("--concurrency", audit.config.politeness.max_concurrency, "Concurrent origin probes")
      ->capture_default_str();
  a->add_option("--per-host", audit.config.politeness.max_per_host, "Concurrent requests per origin host")
      ->capture_default_str();
  a->add_option("--per-host-delay-ms", delay_ms, "Pause between requests to one host")->capture_default_str();
  a->add_option("--archive-concurrency", audit.config.archive_concurrency, "Concurrent TimeMap fetches")
      ->capture_default_str();
  a->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->capture_default_str();
  a->add_option("--max-redirects", audit.config.probe.max_redirects, "Redirects followed by probes")
      ->capture_default_str();
  a->add_option("--timeout-retries", audit.config.probe.timeout_retries, "Probe retries after a timeout")
      ->capture_default_str();
  a->add_option("--fetch-attempts", audit.config.retry.max_attempts, "TimeMap attempts per pass")
      ->capture_default_str();
  a->add_option("--backoff-ms", backoff_ms, "Initial TimeMap retry backoff")->capture_default_str();
  a->add_option("--deadline-ms", deadline_ms, "Overall TimeMap deadline per URL and pass")->capture_default_str();
  a->add_option("--chunk-size", audit.config.chunk_size, "Distinct URLs per round")->capture_default_str();
  a->add_option("--user-agent", audit.origin_transport.user_agent, "User-Agent header")->capture_default_str();

  // report
  ReportOptions report;
  auto* r = app.add_subcommand("report", "Summarize an outcome file");
  r->add_option("--outcomes", report.outcomes, "Outcome file from audit")->required();
  r->add_option("--group-by", report.group_by, "none or subject")->capture_default_str();
  r->add_option("--format", report.format, "csv, json or plot-data")->capture_default_str();
  r->add_option("--month-days", report.windows.month_days, "Short window length")->capture_default_str();
  r->add_option("--year-days", report.windows.year_days, "Long window length")->capture_default_str();
  r->add_option("--out", report.out, "Write here instead of stdout");

  // seeds
  SeedsOptions seeds;
  std::string updated;
  std::string self_link;
  auto* s = app.add_subcommand("seeds", "Export records as a crawler seed feed");
  s->add_option("--records", seeds.records, "Record file from extract")->required();
  s->add_option("--format", seeds.format, "atom or plain")->capture_default_str();
  s->add_option("--updated", updated, "Feed timestamp (YYYY-MM-DDThh:mm:ssZ); default latest publication date");
  s->add_option("--feed-id", seeds.meta.feed_id, "Feed id")->capture_default_str();
  s->add_option("--title", seeds.meta.title, "Feed title")->capture_default_str();
  s->add_option("--author", seeds.meta.author, "Feed author")->capture_default_str();
  s->add_option("--tag-authority", seeds.meta.tag_authority, "Authority of entry tag: ids")->capture_default_str();
  s->add_option("--tag-date", seeds.meta.tag_date, "Date of entry tag: ids")->capture_default_str();
  s->add_option("--self-link", self_link, "rel=\"self\" link of the feed");
  s->add_option("--out", seeds.out, "Write here instead of stdout");

  // sim
  SimOptions sim;
  auto* m = app.add_subcommand("sim", "Serve a simulated web and Memento archive from a scenario file");
  m->add_option("--scenario", sim.scenario, "Scenario file (JSON lines)")->required();
  m->add_option("--bind", sim.bind, "host:port to listen on")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  return run_command(
      [&]() -> int {
        if (x->parsed()) {
          extract.manifest = manifest.empty() ? extract.corpus_dir / "manifest.jsonl" : std::filesystem::path(manifest);
          return cmd_extract(extract, std::cout, std::cerr);
        }
        if (a->parsed()) {
          if (timeout_ms <= 0 || backoff_ms < 0 || deadline_ms <= 0 || delay_ms < 0)
            throw UsageError("durations must be positive");
          audit.config.politeness.per_host_delay = std::chrono::milliseconds(delay_ms);
          audit.config.retry.initial_backoff = std::chrono::milliseconds(backoff_ms);
          audit.config.retry.deadline = std::chrono::milliseconds(deadline_ms);
          audit.origin_transport.timeout = std::chrono::milliseconds(timeout_ms);
          audit.archive_transport = audit.origin_transport;
          if (!proxy.empty()) audit.origin_transport.proxy = proxy;
          if (!archive_proxy.empty()) audit.archive_transport.proxy = archive_proxy;
          return cmd_audit(audit, std::cout, std::cerr);
        }
        if (r->parsed()) return cmd_report(report, std::cout, std::cerr);
        if (s->parsed()) {
          if (!updated.empty()) {
            seeds.updated = parse_iso_datetime(updated);
            if (!seeds.updated) throw UsageError("bad --updated '" + updated + "'");
          }
          if (!self_link.empty()) seeds.meta.self_link = self_link;
          return cmd_seeds(seeds, std::cout, std::cerr);
        }
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        return cmd_sim(sim, g_stop, std::cout, std::cerr);
      },
      std::cerr);
}

#include "linkaudit/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "linkaudit/archive_sim.hpp"
#include "linkaudit/records_io.hpp"
#include "linkaudit/text.hpp"

namespace linkaudit {
namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path.string());
}

void require_output_dir(const fs::path& path) {
  const auto dir = path.parent_path();
  if (!dir.empty() && !fs::is_directory(dir)) throw UsageError("output directory does not exist: " + dir.string());
}

void emit(const std::optional<fs::path>& path, const std::string& text, std::ostream& out) {
  if (path) {
    require_output_dir(*path);
    write_file_atomic(*path, text);
  } else {
    out << text;
  }
}

std::string record_key(const CitationRecord& r) { return r.url.str() + '\t' + r.paper_id; }

void validate_template(std::string_view name, std::string_view url_template) {
  if (!split_url(expand_endpoint(url_template, "http://example.org/")))
    throw UsageError(std::string(name) + " template does not expand to an http(s) URL: " + std::string(url_template));
}

}  // namespace

int run_command(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EmptyDataset& e) {
    err << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const NetworkAbort& e) {
    err << "error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_extract(const ExtractOptions& options, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(options.corpus_dir))
    throw UsageError("corpus directory not found: " + options.corpus_dir.string());
  require_file(options.manifest, "manifest");
  require_output_dir(options.out);

  Diagnostics warnings;
  auto tlds = options.tables.tld_file ? load_tld_set(*options.tables.tld_file, warnings) : bundled_tld_set();
  auto blacklist = options.tables.blacklist_file ? load_blacklist(*options.tables.blacklist_file) : Blacklist::bundled();
  const Normalizer normalizer(std::move(tlds), std::move(blacklist));

  const auto docs = load_corpus(options.corpus_dir, options.manifest);
  const auto result = ingest_corpus(docs, normalizer, options.threads);
  write_file_atomic(options.out, format_citations(result.records));

  for (const auto& w : warnings) err << "warning: " << w << "\n";
  for (const auto& d : result.diagnostics) err << "warning: " << d << "\n";

  const auto& s = result.summary;
  out << "papers: " << s.papers << "\n";
  out << "raw links: " << s.raw_links << "\n";
  for (auto kind : {DiscardKind::NonAsciiIrreducible, DiscardKind::Malformed, DiscardKind::UnknownTld,
                    DiscardKind::NonNumericPort, DiscardKind::Blacklisted}) {
    const auto it = s.discarded.find(kind);
    out << "discarded " << to_string(kind) << ": " << (it == s.discarded.end() ? 0 : it->second) << "\n";
  }
  out << "distinct urls: " << s.distinct_urls << "\n";
  out << "records: " << result.records.size() << "\n";
  return kExitOk;
}

int cmd_audit(const AuditOptions& options, std::ostream& out, std::ostream& err) {
  // Paths are checked before any transport exists.
  require_file(options.records, "records file");
  require_output_dir(options.out);
  NetworkTransport origin(options.origin_transport);
  NetworkTransport archive(options.archive_transport);
  return cmd_audit(options, origin, archive, out, err);
}

int cmd_audit(const AuditOptions& options, HttpTransport& origin, HttpTransport& archive, std::ostream& out,
              std::ostream& err) {
  require_file(options.records, "records file");
  require_output_dir(options.out);
  validate_template("timemap", options.config.endpoint.timemap_template);
  const auto records = read_citations(options.records);
  const auto failures_path = options.failures_out.value_or(fs::path(options.out.string() + ".fetch_errors.jsonl"));

  std::map<std::string, AuditOutcome> done;
  if (options.resume && fs::exists(options.out)) {
    auto previous = read_outcomes(options.out, true);
    if (previous.truncated_tail) err << "warning: ignoring truncated last line of " << options.out.string() << "\n";
    for (auto& o : previous.outcomes) done.insert_or_assign(record_key(o.record), std::move(o));
    write_file_atomic(options.out, format_outcomes(previous.outcomes));
  } else {
    write_file_atomic(options.out, "");
  }

  std::vector<CitationRecord> pending;
  for (const auto& r : records)
    if (!done.contains(record_key(r))) pending.push_back(r);

  std::ofstream append(options.out, std::ios::app | std::ios::binary);
  if (!append) throw Error("cannot append to " + options.out.string());
  const OutcomeSink sink = [&](std::span<const AuditOutcome> batch) {
    append << format_outcomes(batch);
    append.flush();
  };

  const auto result = run_audit(pending, origin, archive, options.config, sink);
  append.close();

  for (const auto& o : result.outcomes) done.insert_or_assign(record_key(o.record), o);
  std::vector<AuditOutcome> merged;
  std::set<std::string> emitted;
  for (const auto& r : records) {
    const auto key = record_key(r);
    const auto it = done.find(key);
    if (it != done.end() && emitted.insert(key).second) merged.push_back(it->second);
  }
  write_file_atomic(options.out, format_outcomes(merged));

  if (result.fetch_failures.empty()) {
    std::error_code ignored;
    fs::remove(failures_path, ignored);
  } else {
    std::string text;
    for (const auto& f : result.fetch_failures) {
      nlohmann::ordered_json doc;
      doc["url"] = f.url.str();
      doc["attempts"] = f.error.attempts;
      doc["last_status"] = f.error.last_status ? nlohmann::ordered_json(*f.error.last_status) : nullptr;
      doc["detail"] = f.error.detail;
      text += doc.dump() + "\n";
    }
    write_file_atomic(failures_path, text);
    err << "warning: " << result.fetch_failures.size() << " URLs could not be looked up; see "
        << failures_path.string() << "\n";
  }

  out << "records: " << records.size() << "\n";
  out << "resumed: " << (records.size() - pending.size()) << "\n";
  out << "outcomes: " << merged.size() << "\n";
  out << "fetch failures: " << result.fetch_failures.size() << "\n";
  return kExitOk;
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream&) {
  require_file(options.outcomes, "outcomes file");
  bool by_subject = false;
  if (options.group_by == "subject")
    by_subject = true;
  else if (options.group_by != "none")
    throw UsageError("unknown group_by '" + options.group_by + "' (expected none or subject)");
  const auto format = parse_report_format(options.format);
  if (options.windows.month_days <= 0 || options.windows.year_days <= 0)
    throw UsageError("window lengths must be positive");

  const auto outcomes = read_outcomes(options.outcomes).outcomes;
  const auto report = build_report(outcomes, by_subject, options.windows);
  emit(options.out, render_report(report, format), out);
  return kExitOk;
}

int cmd_seeds(const SeedsOptions& options, std::ostream& out, std::ostream&) {
  require_file(options.records, "records file");
  if (options.format != "atom" && options.format != "plain")
    throw UsageError("unknown seeds format '" + options.format + "' (expected atom or plain)");
  const auto records = read_citations(options.records);
  auto meta = options.meta;
  if (options.updated) {
    meta.updated_at = *options.updated;
  } else {
    for (const auto& r : records) meta.updated_at = std::max(meta.updated_at, midnight(r.publication_date.day));
  }
  emit(options.out, options.format == "atom" ? export_feed(records, meta) : export_plain_seeds(records), out);
  return kExitOk;
}

int cmd_sim(const SimOptions& options, const std::atomic<bool>& stop, std::ostream& out, std::ostream&) {
  require_file(options.scenario, "scenario file");
  auto server = serve(load_scenario(options.scenario), options.bind);
  out << "archive_sim serving " << server->scenario().resources.size() << " resources on " << server->base_url()
      << " (archive host " << server->scenario().archive_host << ")\n";
  out.flush();
  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server->stop();
  out << "archive_sim stopped\n";
  return kExitOk;
}

}  // namespace linkaudit

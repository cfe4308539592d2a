#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "linkaudit/audit.hpp"
#include "linkaudit/http.hpp"
#include "linkaudit/reporting.hpp"
#include "linkaudit/seed_export.hpp"

namespace linkaudit {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitEmpty = 3;
inline constexpr int kExitNetwork = 4;

/// Runs `body`, reporting library exceptions on `err` and mapping them to
/// exit codes.
int run_command(const std::function<int()>& body, std::ostream& err);

struct TableOptions {
  std::optional<std::filesystem::path> tld_file;
  std::optional<std::filesystem::path> blacklist_file;
};

struct ExtractOptions {
  std::filesystem::path corpus_dir;
  std::filesystem::path manifest;
  std::filesystem::path out;
  TableOptions tables;
  unsigned threads = 1;
};

int cmd_extract(const ExtractOptions& options, std::ostream& out, std::ostream& err);

struct AuditOptions {
  std::filesystem::path records;
  std::filesystem::path out;
  /// Defaults to "<out>.fetch_errors.jsonl".
  std::optional<std::filesystem::path> failures_out;
  bool resume = false;
  AuditConfig config;
  TransportOptions origin_transport;
  TransportOptions archive_transport;
};

int cmd_audit(const AuditOptions& options, std::ostream& out, std::ostream& err);
/// Same, over caller-supplied transports.
int cmd_audit(const AuditOptions& options, HttpTransport& origin, HttpTransport& archive, std::ostream& out,
              std::ostream& err);

struct ReportOptions {
  std::filesystem::path outcomes;
  std::string group_by = "none";
  std::string format = "csv";
  Windows windows;
  std::optional<std::filesystem::path> out;
};

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

struct SeedsOptions {
  std::filesystem::path records;
  std::string format = "atom";
  FeedMeta meta;
  /// Overrides meta.updated_at; without it the latest publication date in
  /// the records is used.
  std::optional<UtcTime> updated;
  std::optional<std::filesystem::path> out;
};

int cmd_seeds(const SeedsOptions& options, std::ostream& out, std::ostream& err);

struct SimOptions {
  std::filesystem::path scenario;
  std::string bind = "127.0.0.1:8080";
};

/// Serves until `stop` becomes true.
int cmd_sim(const SimOptions& options, const std::atomic<bool>& stop, std::ostream& out, std::ostream& err);

}  // namespace linkaudit

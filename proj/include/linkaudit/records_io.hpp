#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkaudit/analyzer.hpp"
#include "linkaudit/corpus_ingest.hpp"
#include "linkaudit/liveness.hpp"

namespace linkaudit {

// Line-delimited JSON for every pipeline stage. Each `*_to_json` returns one
// line without the trailing newline; each `*_from_json` throws LoadError
// naming `source` and `line_no`.

std::string citation_to_json(const CitationRecord& record);
CitationRecord citation_from_json(std::string_view line, std::string_view source = "<records>",
                                  std::size_t line_no = 0);

std::string probe_to_json(const ProbeResult& probe);
ProbeResult probe_from_json(std::string_view line, std::string_view source = "<probes>", std::size_t line_no = 0);

std::string outcome_to_json(const AuditOutcome& outcome);
AuditOutcome outcome_from_json(std::string_view line, std::string_view source = "<outcomes>",
                               std::size_t line_no = 0);

std::vector<CitationRecord> read_citations(const std::filesystem::path& path);
std::string format_citations(std::span<const CitationRecord> records);

struct OutcomeFile {
  std::vector<AuditOutcome> outcomes;
  /// The last line was cut off mid-write and ignored.
  bool truncated_tail = false;
};

/// With `tolerate_truncated_tail`, an unparseable final line without a
/// newline is dropped instead of failing (an interrupted append).
OutcomeFile read_outcomes(const std::filesystem::path& path, bool tolerate_truncated_tail = false);
std::string format_outcomes(std::span<const AuditOutcome> outcomes);

/// Reads a corpus manifest: one JSON object per line with "paper_id",
/// "publication_date", "subjects" and optional "markup"/"text" file names
/// relative to `corpus_dir` (default "<paper_id>.html" / "<paper_id>.txt",
/// each optional on disk).
std::vector<DocumentSource> load_corpus(const std::filesystem::path& corpus_dir,
                                        const std::filesystem::path& manifest);

}  // namespace linkaudit

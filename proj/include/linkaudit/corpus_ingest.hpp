#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkaudit/errors.hpp"
#include "linkaudit/normalizer.hpp"
#include "linkaudit/time.hpp"

namespace linkaudit {

struct PaperMetadata {
  /// As supplied by the repository; parsed when records are built.
  std::string publication_date;
  /// Zero or more subject codes ("cs.DL", "math") or discipline names.
  std::vector<std::string> subjects;
};

/// One converted paper: markup from an external PDF-to-markup step plus its
/// plain text.
struct DocumentSource {
  std::string paper_id;
  std::string body_markup;
  std::string body_text;
  PaperMetadata metadata;
};

/// One {URL, paper, publication date, subjects} tuple.
struct CitationRecord {
  NormalizedUrl url;
  std::string paper_id;
  PublicationDate publication_date;
  std::vector<std::string> subjects;

  friend bool operator==(const CitationRecord&, const CitationRecord&) = default;
};

struct MarkupLinks {
  std::vector<std::string> hrefs;
  std::optional<std::string> diagnostic;
};

/// href values of every <a> element, in document order, duplicates kept.
/// Tolerates unquoted attributes, comments and truncated input.
MarkupLinks extract_markup_links(std::string_view markup);

/// Liberal URL scan over running text: scheme-prefixed, www-prefixed and
/// bare-domain-with-path forms. Trailing sentence punctuation is stripped;
/// every returned string is a substring of `text`.
std::vector<std::string> extract_text_links(std::string_view text);

/// Top level of a hierarchical subject code: "cs.dl" -> "cs".
std::string collapse_subject(std::string_view subject);

/// Display names for collapsed subject codes. Unknown codes map to themselves.
class SubjectLabels {
 public:
  SubjectLabels() = default;
  explicit SubjectLabels(std::map<std::string, std::string, std::less<>> labels)
      : labels_(std::move(labels)) {}

  std::string label(std::string_view code) const;

  /// arXiv top-level archives.
  static const SubjectLabels& arxiv();

 private:
  std::map<std::string, std::string, std::less<>> labels_;
};

/// One record per distinct URL in `urls`, subjects collapsed. A document whose
/// publication date does not parse yields no records and a diagnostic.
std::vector<CitationRecord> build_records(const DocumentSource& doc,
                                          std::span<const NormalizedUrl> urls,
                                          Diagnostics& diagnostics);

struct DedupedCorpus {
  std::vector<CitationRecord> records;
  std::size_t distinct_urls = 0;
};

/// Drops repeated (url, paper_id) pairs, keeping first occurrences in order.
DedupedCorpus dedupe_corpus(std::span<const CitationRecord> records);

struct IngestSummary {
  std::size_t papers = 0;
  std::size_t raw_links = 0;
  std::map<DiscardKind, std::size_t> discarded;
  std::size_t distinct_urls = 0;
};

struct IngestResult {
  std::vector<CitationRecord> records;
  IngestSummary summary;
  Diagnostics diagnostics;
};

/// Full extraction pipeline: markup and text links, normalization, per-paper
/// dedup, record building, corpus dedup. Documents are processed on up to
/// `threads` workers; output order follows input order.
IngestResult ingest_corpus(std::span<const DocumentSource> docs, const Normalizer& normalizer,
                           unsigned threads = 1);

}  // namespace linkaudit

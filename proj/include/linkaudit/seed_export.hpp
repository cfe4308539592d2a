#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkaudit/corpus_ingest.hpp"

namespace linkaudit {

struct FeedMeta {
  std::string feed_id = "urn:linkaudit:seeds";
  std::string title = "Referenced URLs";
  std::string author = "linkaudit";
  /// Authority and date of the tag: URIs used as entry ids.
  std::string tag_authority = "linkaudit.invalid";
  std::string tag_date = "2011";
  std::optional<std::string> self_link;
  /// Injected so identical inputs give identical bytes.
  UtcTime updated_at{};
};

struct SeedEntry {
  std::string id;
  std::string paper_id;
  PublicationDate publication_date;
  std::vector<NormalizedUrl> urls;
  UtcTime updated_at{};
};

/// "tag:<authority>,<date>:paper/<escaped paper_id>"
std::string entry_tag_id(const FeedMeta& meta, std::string_view paper_id);

/// One entry per paper, ordered by paper_id, URLs deduplicated and sorted.
std::vector<SeedEntry> collect_seed_entries(std::span<const CitationRecord> records, const FeedMeta& meta);

/// Atom feed with one entry per paper and one rel="related" link per
/// referenced URL.
std::string export_feed(std::span<const CitationRecord> records, const FeedMeta& meta);

/// Sorted, corpus-deduplicated URLs, one per line.
std::string export_plain_seeds(std::span<const CitationRecord> records);

}  // namespace linkaudit

#include "linkaudit/seed_export.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "linkaudit/text.hpp"

namespace linkaudit {
namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters other than tab/newline are not allowed in XML 1.0.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') out += ' ';
        else out += c;
    }
  }
  return out;
}

// Characters allowed unescaped in the specific part of a tag URI.
bool tag_safe(char c) {
  return ascii_isalnum(c) || std::string_view("-._~!$&'()*+,;=:@/?").find(c) != std::string_view::npos;
}

}  // namespace

std::string entry_tag_id(const FeedMeta& meta, std::string_view paper_id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out = "tag:" + meta.tag_authority + "," + meta.tag_date + ":paper/";
  for (char c : paper_id) {
    if (tag_safe(c)) {
      out += c;
    } else {
      const auto b = static_cast<unsigned char>(c);
      out += '%';
      out += kHex[b >> 4];
      out += kHex[b & 0xF];
    }
  }
  return out;
}

std::vector<SeedEntry> collect_seed_entries(std::span<const CitationRecord> records, const FeedMeta& meta) {
  std::map<std::string, SeedEntry> by_paper;
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& r : records) {
    auto [it, inserted] = by_paper.try_emplace(r.paper_id);
    auto& entry = it->second;
    if (inserted) {
      entry.id = entry_tag_id(meta, r.paper_id);
      entry.paper_id = r.paper_id;
      entry.publication_date = r.publication_date;
      entry.updated_at = meta.updated_at;
    }
    if (seen[r.paper_id].insert(r.url.str()).second) entry.urls.push_back(r.url);
  }
  std::vector<SeedEntry> out;
  out.reserve(by_paper.size());
  for (auto& [id, entry] : by_paper) {
    std::sort(entry.urls.begin(), entry.urls.end(),
              [](const NormalizedUrl& a, const NormalizedUrl& b) { return a.str() < b.str(); });
    out.push_back(std::move(entry));
  }
  return out;
}

std::string export_feed(std::span<const CitationRecord> records, const FeedMeta& meta) {
  const auto updated = format_iso_datetime(meta.updated_at);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out += "<feed xmlns=\"http://www.w3.org/2005/Atom\">\n";
  out += "  <id>" + xml_escape(meta.feed_id) + "</id>\n";
  out += "  <title>" + xml_escape(meta.title) + "</title>\n";
  out += "  <updated>" + updated + "</updated>\n";
  out += "  <author><name>" + xml_escape(meta.author) + "</name></author>\n";
  if (meta.self_link) out += "  <link rel=\"self\" href=\"" + xml_escape(*meta.self_link) + "\"/>\n";
  for (const auto& entry : collect_seed_entries(records, meta)) {
    out += "  <entry>\n";
    out += "    <id>" + xml_escape(entry.id) + "</id>\n";
    out += "    <title>" + xml_escape(entry.paper_id) + "</title>\n";
    out += "    <updated>" + format_iso_datetime(entry.updated_at) + "</updated>\n";
    out += "    <published>" + format_iso_datetime(midnight(entry.publication_date.day)) + "</published>\n";
    for (const auto& url : entry.urls) out += "    <link rel=\"related\" href=\"" + xml_escape(url.str()) + "\"/>\n";
    out += "  </entry>\n";
  }
  out += "</feed>\n";
  return out;
}

std::string export_plain_seeds(std::span<const CitationRecord> records) {
  std::set<std::string> urls;
  for (const auto& r : records) urls.insert(r.url.str());
  std::string out;
  for (const auto& u : urls) {
    out += u;
    out += '\n';
  }
  return out;
}

}  // namespace linkaudit

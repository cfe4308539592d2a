#include "linkaudit/corpus_ingest.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "linkaudit/concurrency.hpp"
#include "linkaudit/text.hpp"

namespace linkaudit {
namespace {

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const auto name = s.substr(i + 1, semi - i - 1);
    std::optional<unsigned long> cp;
    if (name == "amp") cp = '&';
    else if (name == "lt") cp = '<';
    else if (name == "gt") cp = '>';
    else if (name == "quot") cp = '"';
    else if (name == "apos") cp = '\'';
    else if (name.size() > 1 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const auto digits = name.substr(hex ? 2 : 1);
      unsigned long value = 0;
      bool ok = !digits.empty();
      for (char c : digits) {
        int d = -1;
        if (ascii_isdigit(c)) d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || value > 0x10FFFF) { ok = false; break; }
        value = value * (hex ? 16 : 10) + static_cast<unsigned long>(d);
      }
      if (ok) cp = value;
    }
    if (!cp) {
      out.push_back('&');
      continue;
    }
    append_utf8(out, *cp);
    i = semi;
  }
  return out;
}

bool is_tag_name_char(char c) { return ascii_isalnum(c) || c == '-' || c == ':'; }

// Characters that may precede the start of a URL in running text.
bool url_boundary_before(std::string_view text, std::size_t i) {
  if (i == 0) return true;
  const char p = text[i - 1];
  return !(ascii_isalnum(p) || p == '-' || p == '.' || p == '_' || p == '@' || p == '/' ||
           p == ':' || p == '%' || p == '~');
}

bool is_domain_char(char c) { return ascii_isalnum(c) || c == '-' || c == '.'; }

bool ends_run(char c) { return ascii_isspace(c) || c == '<' || c == '>' || c == '"'; }

// Length of a link prefix starting at i, or 0 when none starts there.
std::size_t link_prefix_length(std::string_view text, std::size_t i) {
  const std::string_view rest = text.substr(i);
  // scheme://
  if (ascii_isalpha(rest[0])) {
    std::size_t j = 1;
    while (j < rest.size() && (ascii_isalnum(rest[j]) || rest[j] == '+' || rest[j] == '-' || rest[j] == '.'))
      ++j;
    if (rest.substr(j, 3) == "://") return j + 3;
  }
  // www., www1. ...
  if (istarts_with(rest, "www")) {
    std::size_t j = 3;
    while (j < rest.size() && j < 6 && ascii_isdigit(rest[j])) ++j;
    if (j < rest.size() && rest[j] == '.') return j + 1;
  }
  // bare domain followed by a path: host.tld/
  std::size_t j = 0;
  while (j < rest.size() && is_domain_char(rest[j])) ++j;
  if (j < rest.size() && rest[j] == '/') {
    const auto host = rest.substr(0, j);
    const auto dot = host.rfind('.');
    if (dot != std::string_view::npos && dot > 0) {
      const auto tld = host.substr(dot + 1);
      if (tld.size() >= 2 && tld.size() <= 6 && std::all_of(tld.begin(), tld.end(), ascii_isalpha))
        return j;
    }
  }
  return 0;
}

std::string_view strip_trailing_punctuation(std::string_view s) {
  while (!s.empty()) {
    const char c = s.back();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '\'' ||
        c == ']' || c == '}') {
      s.remove_suffix(1);
    } else if (c == ')' &&
               std::count(s.begin(), s.end(), '(') < std::count(s.begin(), s.end(), ')')) {
      s.remove_suffix(1);
    } else {
      break;
    }
  }
  return s;
}

std::vector<std::string> unique_subjects(const std::vector<std::string>& subjects) {
  std::vector<std::string> out;
  for (const auto& s : subjects) {
    if (trim(s).empty()) continue;
    auto top = collapse_subject(s);
    if (std::find(out.begin(), out.end(), top) == out.end()) out.push_back(std::move(top));
  }
  return out;
}

}  // namespace

MarkupLinks extract_markup_links(std::string_view markup) {
  MarkupLinks result;
  if (markup.find('\0') != std::string_view::npos) {
    result.diagnostic = "markup contains NUL bytes; not a text document";
    return result;
  }
  const std::size_t n = markup.size();
  std::size_t i = 0;
  while (i < n) {
    const auto lt = markup.find('<', i);
    if (lt == std::string_view::npos) break;
    if (markup.substr(lt, 4) == "<!--") {
      const auto end = markup.find("-->", lt + 4);
      if (end == std::string_view::npos) {
        result.diagnostic = "unterminated comment at offset " + std::to_string(lt);
        break;
      }
      i = end + 3;
      continue;
    }
    std::size_t j = lt + 1;
    const std::size_t name_start = j;
    while (j < n && is_tag_name_char(markup[j])) ++j;
    const auto name = markup.substr(name_start, j - name_start);
    const bool is_anchor = iequals(name, "a") && (j >= n || ascii_isspace(markup[j]) ||
                                                  markup[j] == '>' || markup[j] == '/');
    if (!is_anchor) {
      const auto gt = markup.find('>', j);
      if (gt == std::string_view::npos) break;
      i = gt + 1;
      continue;
    }

    // Attribute list of an anchor start tag.
    std::optional<std::string> href;
    bool closed = false;
    while (j < n) {
      while (j < n && (ascii_isspace(markup[j]) || markup[j] == '/')) ++j;
      if (j >= n) break;
      if (markup[j] == '>') {
        closed = true;
        ++j;
        break;
      }
      const std::size_t attr_start = j;
      while (j < n && !ascii_isspace(markup[j]) && markup[j] != '=' && markup[j] != '>' &&
             markup[j] != '/')
        ++j;
      const auto attr = markup.substr(attr_start, j - attr_start);
      while (j < n && ascii_isspace(markup[j])) ++j;
      std::optional<std::string_view> value;
      if (j < n && markup[j] == '=') {
        ++j;
        while (j < n && ascii_isspace(markup[j])) ++j;
        if (j < n && (markup[j] == '"' || markup[j] == '\'')) {
          const char quote = markup[j];
          const auto close = markup.find(quote, j + 1);
          if (close == std::string_view::npos) {
            j = n;
            break;
          }
          value = markup.substr(j + 1, close - j - 1);
          j = close + 1;
        } else {
          const std::size_t v = j;
          while (j < n && !ascii_isspace(markup[j]) && markup[j] != '>') ++j;
          value = markup.substr(v, j - v);
        }
      }
      if (!href && value && iequals(attr, "href")) href = std::string(trim(decode_entities(*value)));
    }
    if (!closed) {
      result.diagnostic = "unterminated anchor tag at offset " + std::to_string(lt);
      break;
    }
    if (href) result.hrefs.push_back(std::move(*href));
    i = j;
  }
  return result;
}

std::vector<std::string> extract_text_links(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (ends_run(text[i]) || !url_boundary_before(text, i)) {
      ++i;
      continue;
    }
    const std::size_t prefix = link_prefix_length(text, i);
    if (prefix == 0) {
      ++i;
      continue;
    }
    std::size_t end = i + prefix;
    while (end < text.size() && !ends_run(text[end])) ++end;
    const auto candidate = strip_trailing_punctuation(text.substr(i, end - i));
    if (candidate.size() > prefix) {
      out.emplace_back(candidate);
      i += candidate.size();
    } else {
      ++i;
    }
  }
  return out;
}

std::string collapse_subject(std::string_view subject) {
  subject = trim(subject);
  return std::string(subject.substr(0, subject.find('.')));
}

std::string SubjectLabels::label(std::string_view code) const {
  if (auto it = labels_.find(code); it != labels_.end()) return it->second;
  return std::string(code);
}

const SubjectLabels& SubjectLabels::arxiv() {
  static const SubjectLabels labels({
      {"astro-ph", "Astrophysics"},
      {"cond-mat", "Condensed Matter"},
      {"cs", "Computer Science"},
      {"gr-qc", "General Relativity and Quantum Cosmology"},
      {"hep-ex", "High Energy Physics - Experiment"},
      {"hep-lat", "High Energy Physics - Lattice"},
      {"hep-ph", "High Energy Physics - Phenomenology"},
      {"hep-th", "High Energy Physics - Theory"},
      {"math", "Mathematics"},
      {"math-ph", "Mathematical Physics"},
      {"nlin", "Nonlinear Sciences"},
      {"nucl-ex", "Nuclear Experiment"},
      {"nucl-th", "Nuclear Theory"},
      {"physics", "Physics"},
      {"q-bio", "Quantitative Biology"},
      {"q-fin", "Quantitative Finance"},
      {"quant-ph", "Quantum Physics"},
      {"stat", "Statistics"},
  });
  return labels;
}

std::vector<CitationRecord> build_records(const DocumentSource& doc,
                                          std::span<const NormalizedUrl> urls,
                                          Diagnostics& diagnostics) {
  if (urls.empty()) return {};
  const auto date = parse_publication_date(trim(doc.metadata.publication_date));
  if (!date) {
    diagnostics.push_back("paper " + doc.paper_id + ": unparseable publication date '" +
                          doc.metadata.publication_date + "'; skipped");
    return {};
  }
  const auto subjects = unique_subjects(doc.metadata.subjects);
  std::vector<CitationRecord> records;
  std::unordered_set<std::string> seen;
  for (const auto& url : urls) {
    if (!seen.insert(url.str()).second) continue;
    records.push_back(CitationRecord{url, doc.paper_id, *date, subjects});
  }
  return records;
}

DedupedCorpus dedupe_corpus(std::span<const CitationRecord> records) {
  DedupedCorpus out;
  std::set<std::pair<std::string, std::string>> pairs;
  std::unordered_set<std::string> urls;
  for (const auto& r : records) {
    auto key = r.url.str();
    urls.insert(key);
    if (pairs.emplace(std::move(key), r.paper_id).second) out.records.push_back(r);
  }
  out.distinct_urls = urls.size();
  return out;
}

IngestResult ingest_corpus(std::span<const DocumentSource> docs, const Normalizer& normalizer,
                           unsigned threads) {
  struct PerDocument {
    std::vector<CitationRecord> records;
    std::size_t raw_links = 0;
    std::map<DiscardKind, std::size_t> discarded;
    Diagnostics diagnostics;
    bool skipped = false;
  };

  IngestResult result;
  std::vector<PerDocument> per_doc(docs.size());

  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].paper_id.empty()) {
      per_doc[i].skipped = true;
      per_doc[i].diagnostics.push_back("document #" + std::to_string(i) + " has an empty paper_id; skipped");
    } else if (!ids.insert(docs[i].paper_id).second) {
      per_doc[i].skipped = true;
      per_doc[i].diagnostics.push_back("duplicate paper_id " + docs[i].paper_id + "; later copy skipped");
    }
  }

  parallel_for(docs.size(), threads, [&](std::size_t i) {
    auto& out = per_doc[i];
    if (out.skipped) return;
    const auto& doc = docs[i];
    auto markup = extract_markup_links(doc.body_markup);
    if (markup.diagnostic) out.diagnostics.push_back("paper " + doc.paper_id + ": " + *markup.diagnostic);
    auto raw = std::move(markup.hrefs);
    auto text_links = extract_text_links(doc.body_text);
    raw.insert(raw.end(), std::make_move_iterator(text_links.begin()),
               std::make_move_iterator(text_links.end()));
    out.raw_links = raw.size();

    std::vector<NormalizedUrl> urls;
    std::unordered_set<std::string> seen;
    for (const auto& link : raw) {
      auto normalized = normalizer(link);
      if (auto* reason = std::get_if<DiscardReason>(&normalized)) {
        ++out.discarded[reason->kind];
        continue;
      }
      auto& url = std::get<NormalizedUrl>(normalized);
      if (seen.insert(url.str()).second) urls.push_back(std::move(url));
    }
    out.records = build_records(doc, urls, out.diagnostics);
  });

  std::vector<CitationRecord> all;
  for (auto& d : per_doc) {
    if (!d.skipped) ++result.summary.papers;
    result.summary.raw_links += d.raw_links;
    for (auto [kind, count] : d.discarded) result.summary.discarded[kind] += count;
    result.diagnostics.insert(result.diagnostics.end(), d.diagnostics.begin(), d.diagnostics.end());
    all.insert(all.end(), std::make_move_iterator(d.records.begin()),
               std::make_move_iterator(d.records.end()));
  }
  auto deduped = dedupe_corpus(all);
  result.records = std::move(deduped.records);
  result.summary.distinct_urls = deduped.distinct_urls;
  return result;
}

}  // namespace linkaudit

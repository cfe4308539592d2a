#include "linkaudit/records_io.hpp"

#include <json.hpp>

#include "linkaudit/text.hpp"

namespace linkaudit {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void bad(std::string_view source, std::size_t line_no, const std::string& what) {
  throw LoadError(std::string(source), line_no, what);
}

ordered_json parse_line(std::string_view line, std::string_view source, std::size_t line_no) {
  auto doc = ordered_json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) bad(source, line_no, "not a JSON object");
  return doc;
}

template <class T>
T field(const ordered_json& doc, const char* name, std::string_view source, std::size_t line_no) {
  const auto it = doc.find(name);
  if (it == doc.end()) bad(source, line_no, std::string("missing field '") + name + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(source, line_no, std::string("field '") + name + "' has the wrong type");
  }
}

NormalizedUrl url_field(const ordered_json& doc, std::string_view source, std::size_t line_no) {
  const auto text = field<std::string>(doc, "url", source, line_no);
  auto url = NormalizedUrl::from_canonical(text);
  if (!url) bad(source, line_no, "url '" + text + "' is not canonical");
  return *url;
}

void put_citation(ordered_json& doc, const CitationRecord& r) {
  doc["url"] = r.url.str();
  doc["paper_id"] = r.paper_id;
  doc["publication_date"] = format_iso_date(r.publication_date.day);
  if (r.publication_date.precision == DatePrecision::Month) doc["date_precision"] = "month";
  doc["subjects"] = r.subjects;
}

CitationRecord get_citation(const ordered_json& doc, std::string_view source, std::size_t line_no) {
  CitationRecord r;
  r.url = url_field(doc, source, line_no);
  r.paper_id = field<std::string>(doc, "paper_id", source, line_no);
  const auto date_text = field<std::string>(doc, "publication_date", source, line_no);
  const auto date = parse_publication_date(date_text);
  if (!date || date->precision != DatePrecision::Day) bad(source, line_no, "bad publication_date '" + date_text + "'");
  r.publication_date = *date;
  if (const auto it = doc.find("date_precision"); it != doc.end() && *it == "month")
    r.publication_date.precision = DatePrecision::Month;
  r.subjects = field<std::vector<std::string>>(doc, "subjects", source, line_no);
  return r;
}

template <class T, class Parse>
std::vector<T> read_lines(const std::filesystem::path& path, Parse parse) {
  const auto text = read_file(path);
  std::vector<T> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    out.push_back(parse(line, path.string(), line_no));
  }
  return out;
}

}  // namespace

std::string citation_to_json(const CitationRecord& record) {
  ordered_json doc;
  put_citation(doc, record);
  return doc.dump();
}

CitationRecord citation_from_json(std::string_view line, std::string_view source, std::size_t line_no) {
  return get_citation(parse_line(line, source, line_no), source, line_no);
}

std::string probe_to_json(const ProbeResult& p) {
  ordered_json doc;
  doc["url"] = p.url.str();
  doc["final_status"] = p.final_status ? ordered_json(*p.final_status) : ordered_json(nullptr);
  doc["redirect_hops"] = p.redirect_hops;
  doc["reachable"] = p.reachable;
  doc["checked_at"] = format_iso_datetime(p.checked_at);
  doc["failure_kind"] = p.failure_kind ? ordered_json(std::string(to_string(*p.failure_kind))) : ordered_json(nullptr);
  return doc.dump();
}

ProbeResult probe_from_json(std::string_view line, std::string_view source, std::size_t line_no) {
  const auto doc = parse_line(line, source, line_no);
  ProbeResult p;
  p.url = url_field(doc, source, line_no);
  if (const auto it = doc.find("final_status"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) bad(source, line_no, "final_status must be an integer");
    p.final_status = it->get<int>();
  }
  p.redirect_hops = field<int>(doc, "redirect_hops", source, line_no);
  p.reachable = field<bool>(doc, "reachable", source, line_no);
  const auto when = parse_iso_datetime(field<std::string>(doc, "checked_at", source, line_no));
  if (!when) bad(source, line_no, "bad checked_at");
  p.checked_at = *when;
  if (const auto it = doc.find("failure_kind"); it != doc.end() && !it->is_null()) {
    const auto kind = it->is_string() ? failure_kind_from_string(it->get<std::string>()) : std::nullopt;
    if (!kind) bad(source, line_no, "unknown failure_kind");
    p.failure_kind = kind;
  }
  return p;
}

std::string outcome_to_json(const AuditOutcome& o) {
  ordered_json doc;
  put_citation(doc, o.record);
  doc["reachable"] = o.reachable;
  doc["archived"] = o.archived;
  doc["closest"] = o.closest ? ordered_json{{"uri", o.closest->uri}, {"datetime", format_iso_datetime(o.closest->archived_at)}}
                             : ordered_json(nullptr);
  doc["delta_days"] = o.delta_days ? ordered_json(*o.delta_days) : ordered_json(nullptr);
  doc["class"] = to_token(o.availability);
  return doc.dump();
}

AuditOutcome outcome_from_json(std::string_view line, std::string_view source, std::size_t line_no) {
  const auto doc = parse_line(line, source, line_no);
  AuditOutcome o;
  o.record = get_citation(doc, source, line_no);
  o.reachable = field<bool>(doc, "reachable", source, line_no);
  o.archived = field<bool>(doc, "archived", source, line_no);
  if (const auto it = doc.find("closest"); it != doc.end() && !it->is_null()) {
    const auto uri = field<std::string>(*it, "uri", source, line_no);
    const auto when = parse_iso_datetime(field<std::string>(*it, "datetime", source, line_no));
    if (!when) bad(source, line_no, "bad closest.datetime");
    o.closest = Memento{uri, *when};
  }
  if (const auto it = doc.find("delta_days"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) bad(source, line_no, "delta_days must be an integer");
    o.delta_days = it->get<std::int64_t>();
  }
  const auto token = field<std::string>(doc, "class", source, line_no);
  const auto cls = class_from_token(token);
  if (!cls) bad(source, line_no, "unknown class '" + token + "'");
  o.availability = *cls;
  if (o.archived != o.closest.has_value() || o.archived != o.delta_days.has_value())
    bad(source, line_no, "archived, closest and delta_days disagree");
  if (classify(o.reachable, o.archived) != o.availability) bad(source, line_no, "class disagrees with flags");
  return o;
}

std::vector<CitationRecord> read_citations(const std::filesystem::path& path) {
  return read_lines<CitationRecord>(path, [](std::string_view l, std::string_view s, std::size_t n) {
    return citation_from_json(l, s, n);
  });
}

std::string format_citations(std::span<const CitationRecord> records) {
  std::string out;
  for (const auto& r : records) out += citation_to_json(r) + "\n";
  return out;
}

OutcomeFile read_outcomes(const std::filesystem::path& path, bool tolerate_truncated_tail) {
  const auto text = read_file(path);
  OutcomeFile file;
  const auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const bool last_unterminated = i + 1 == lines.size();
    try {
      file.outcomes.push_back(outcome_from_json(lines[i], path.string(), i + 1));
    } catch (const LoadError&) {
      if (!(tolerate_truncated_tail && last_unterminated)) throw;
      file.truncated_tail = true;
    }
  }
  return file;
}

std::string format_outcomes(std::span<const AuditOutcome> outcomes) {
  std::string out;
  for (const auto& o : outcomes) out += outcome_to_json(o) + "\n";
  return out;
}

std::vector<DocumentSource> load_corpus(const std::filesystem::path& corpus_dir, const std::filesystem::path& manifest) {
  const auto text = read_file(manifest);
  const auto source = manifest.string();
  std::vector<DocumentSource> docs;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto doc = parse_line(line, source, line_no);
    DocumentSource d;
    d.paper_id = field<std::string>(doc, "paper_id", source, line_no);
    if (d.paper_id.empty()) bad(source, line_no, "empty paper_id");
    if (const auto it = doc.find("publication_date"); it != doc.end() && it->is_string())
      d.metadata.publication_date = it->get<std::string>();
    if (doc.contains("subjects")) d.metadata.subjects = field<std::vector<std::string>>(doc, "subjects", source, line_no);

    const auto load_part = [&](const char* key, const std::string& fallback) -> std::string {
      if (const auto it = doc.find(key); it != doc.end()) {
        if (!it->is_string()) bad(source, line_no, std::string("field '") + key + "' must be a file name");
        const auto path = corpus_dir / it->get<std::string>();
        if (!std::filesystem::exists(path)) bad(source, line_no, "missing file " + path.string());
        return read_file(path);
      }
      const auto path = corpus_dir / fallback;
      return std::filesystem::exists(path) ? read_file(path) : std::string{};
    };
    d.body_markup = load_part("markup", d.paper_id + ".html");
    d.body_text = load_part("text", d.paper_id + ".txt");
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace linkaudit

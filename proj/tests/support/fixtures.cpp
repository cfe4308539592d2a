#include "fixtures.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "linkaudit/http.hpp"

namespace linkaudit::testing {

NormalizedUrl url(std::string_view canonical) {
  auto u = NormalizedUrl::from_canonical(canonical);
  if (!u) throw std::invalid_argument("not canonical: " + std::string(canonical));
  return *u;
}

Date day(std::string_view iso) {
  const auto d = parse_publication_date(iso);
  if (!d) throw std::invalid_argument("bad date: " + std::string(iso));
  return d->day;
}

UtcTime at(std::string_view iso_datetime) {
  const auto t = parse_iso_datetime(iso_datetime);
  if (!t) throw std::invalid_argument("bad datetime: " + std::string(iso_datetime));
  return *t;
}

CitationRecord record(std::string_view u, std::string paper_id, std::string_view date,
                      std::vector<std::string> subjects) {
  CitationRecord r;
  r.url = url(u);
  r.paper_id = std::move(paper_id);
  r.publication_date = *parse_publication_date(date);
  r.subjects = std::move(subjects);
  return r;
}

AuditOutcome outcome(AvailabilityClass cls, std::optional<std::int64_t> delta, std::vector<std::string> subjects,
                     std::string paper_id) {
  AuditOutcome o;
  o.record = record("http://fixture.org/" + paper_id, paper_id, "2010-01-01", std::move(subjects));
  o.reachable = cls == AvailabilityClass::LiveArchived || cls == AvailabilityClass::LiveUnarchived;
  o.archived = cls == AvailabilityClass::LiveArchived || cls == AvailabilityClass::GoneArchived;
  if (o.archived) {
    const auto d = delta.value_or(0);
    const auto when = midnight(o.record.publication_date.day) + std::chrono::days(d);
    o.closest = Memento{"http://archive.sim/memento/" + format_compact_timestamp(when) + "/" + o.record.url.str(), when};
    o.delta_days = d;
  }
  o.availability = cls;
  return o;
}

std::vector<AuditOutcome> outcomes_with_counts(const Counts& counts, std::vector<std::string> subjects) {
  std::vector<AuditOutcome> out;
  std::size_t n = 0;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < counts[c]; ++i, ++n)
      out.push_back(outcome(kAllClasses[c], static_cast<std::int64_t>(n % 97), subjects, "p" + std::to_string(n)));
  return out;
}

std::vector<AuditOutcome> random_outcomes(std::size_t n, std::mt19937_64& rng) {
  static const std::vector<std::string> pool{"math", "cs", "astro-ph", "physics", "q-bio"};
  std::uniform_int_distribution<int> cls(0, 3);
  std::uniform_int_distribution<std::int64_t> delta(-4000, 4000);
  std::uniform_int_distribution<int> nsub(0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<AuditOutcome> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> subjects;
    for (int k = nsub(rng); k > 0; --k) subjects.insert(pool[pick(rng)]);
    out.push_back(outcome(kAllClasses[static_cast<std::size_t>(cls(rng))], delta(rng),
                          {subjects.begin(), subjects.end()}, "r" + std::to_string(i)));
  }
  return out;
}

std::vector<AuditOutcome> window_fixture() {
  const std::vector<std::int64_t> deltas{
      0,  3,   -5,  10,   -12, 31,  -31, 7, 15, -20, 1, 9,  // within a month
      32, -60, 100, -200, 365, 250, -180, 90,               // within a year
      366, -500, 1000, -1100, 1213};                        // beyond
  std::vector<AuditOutcome> out;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    out.push_back(outcome(i % 3 ? AvailabilityClass::LiveArchived : AvailabilityClass::GoneArchived, deltas[i], {},
                          "w" + std::to_string(i)));
  // Unarchived outcomes must not move archived-only statistics.
  for (int i = 0; i < 8; ++i)
    out.push_back(outcome(i % 2 ? AvailabilityClass::LiveUnarchived : AvailabilityClass::GoneUnarchived, std::nullopt,
                          {}, "u" + std::to_string(i)));
  return out;
}

GeneratedCorpus build_corpus(std::size_t pairs, std::size_t distinct, std::uint64_t seed) {
  if (distinct == 0 || pairs < distinct) throw std::invalid_argument("need pairs >= distinct > 0");
  std::mt19937_64 rng(seed);
  const std::size_t papers = std::max<std::size_t>(2, (pairs - distinct) + 1);
  const std::size_t paper_count = std::min<std::size_t>(papers, 10);

  // (url index, paper index) with every URL used once, extras in other papers.
  std::vector<std::pair<std::size_t, std::size_t>> plan;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t u = 0; u < distinct; ++u) {
    plan.emplace_back(u, u % paper_count);
    seen.emplace(u, u % paper_count);
  }
  for (std::size_t k = 0; plan.size() < pairs; ++k) {
    const std::size_t u = k % distinct;
    const std::size_t p = (u % paper_count + 1 + k / distinct) % paper_count;
    if (seen.emplace(u, p).second) plan.emplace_back(u, p);
  }

  const auto canonical = [](std::size_t u) { return "www.site" + std::to_string(u) + ".org/ref/" + std::to_string(u); };
  GeneratedCorpus corpus;
  corpus.docs.resize(paper_count);
  for (std::size_t p = 0; p < paper_count; ++p) {
    auto& d = corpus.docs[p];
    d.paper_id = "paper-" + std::to_string(p);
    d.metadata.publication_date = "2009-0" + std::to_string(1 + p % 9) + "-15";
    d.metadata.subjects = {p % 2 ? "cs.DL" : "math.CO"};
    d.body_markup = "<html><body>";
    d.body_text = "Plain text of paper " + std::to_string(p) + ".\n";
    // Noise the normalizer discards.
    d.body_markup += "<a href=\"http://localhost/private\">x</a>";
    d.body_text += "mirror at http://unknown.invalidtld/ page.\n";
  }
  std::uniform_int_distribution<int> form(0, 4);
  for (const auto& [u, p] : plan) {
    auto& d = corpus.docs[p];
    const auto base = canonical(u);
    switch (form(rng)) {
      case 0: d.body_markup += "<a href=\"http://" + base + "\">ref</a>"; break;
      case 1: d.body_markup += "<A HREF='http://WWW.SITE" + std::to_string(u) + ".ORG:80/ref/" + std::to_string(u) + "'>r</A>"; break;
      case 2: d.body_text += "see " + base + ".\n"; break;
      case 3: d.body_text += "(http://" + base + "#section)\n"; break;
      default:
        // Cited twice in one paper: still one pair.
        d.body_markup += "<a href=\"http://" + base + "\">a</a>";
        d.body_text += "Available at http://" + base + ", retrieved 2009.\n";
        break;
    }
  }
  for (auto& d : corpus.docs) d.body_markup += "</body></html>";
  corpus.pairs = plan.size();
  corpus.distinct_urls = distinct;
  return corpus;
}

namespace {

std::string to_upper_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

struct Builder {
  std::mt19937_64 rng;
  Scenario scenario;
  std::size_t relay_serial = 0;

  SimResource& add(std::string u) {
    SimResource r;
    r.url = std::move(u);
    scenario.resources.push_back(std::move(r));
    return scenario.resources.back();
  }

  // Redirect chain of `hops` redirects starting at `first`; returns the
  // final hop's URL (not added).
  std::string relay_url() {
    const auto n = relay_serial++;
    return "http://relay" + std::to_string(n % 7) + ".net/r/" + std::to_string(n);
  }

  void chain(SimResource& first, int hops, std::optional<int> final_status) {
    first.live_status = 301;
    std::string next = relay_url();
    first.redirect_to = next;
    for (int h = 1; h < hops; ++h) {
      auto& mid = add(next);
      mid.live_status = h % 2 ? 302 : 307;
      next = relay_url();
      mid.redirect_to = next;
    }
    if (final_status) add(next).live_status = *final_status;  // otherwise the target is unknown (404)
  }
};

}  // namespace

GeneratedScenario generate_scenario(const ScenarioShape& shape) {
  Builder b{std::mt19937_64(shape.seed), {}, 0};
  b.scenario.clock = *parse_iso_datetime("2011-06-01T00:00:00Z");
  b.scenario.timeout_hold = std::chrono::milliseconds(10000);
  GeneratedScenario out;
  out.planted = shape.counts;
  std::size_t total = 0;
  for (auto n : shape.counts) total += n;
  b.scenario.resources.reserve(total * 12);  // chains add up to 11 per record

  static const char* tlds[] = {"org", "com", "net", "edu", "info", "gov"};
  static const std::vector<std::string> subjects{"math", "cs", "astro-ph", "physics"};
  std::uniform_int_distribution<std::size_t> host_pick(0, shape.hosts - 1);
  std::uniform_int_distribution<int> percent(0, 99);
  std::uniform_int_distribution<long> pub_day(0, 4000);
  std::uniform_int_distribution<long> offset_seconds(-3L * 365 * 86400, 5L * 365 * 86400);
  std::uniform_int_distribution<int> snapshot_count(1, 5);

  const auto reference = day("2000-01-01");
  const auto lower = at("1996-01-01T00:00:00Z");
  const auto upper = b.scenario.clock;
  std::size_t timeouts_left = shape.origin_timeouts;
  std::size_t serial = 0;

  for (std::size_t c = 0; c < 4; ++c) {
    const bool live = c == 0 || c == 1;
    const bool archived = c == 0 || c == 2;
    for (std::size_t i = 0; i < shape.counts[c]; ++i, ++serial) {
      const auto host = "host" + std::to_string(host_pick(b.rng)) + "." + tlds[serial % 6];
      std::string path;
      switch (serial % 4) {
        case 0: path = "/doc/" + std::to_string(serial); break;
        case 1: path = "/doc/" + std::to_string(serial) + ".html"; break;
        case 2: path = "/q?id=" + std::to_string(serial); break;
        default: path = "/~user" + std::to_string(serial) + "/paper.pdf"; break;
      }
      const auto canonical = "http://" + host + path;
      auto& r = b.add(canonical);
      const auto index = b.scenario.resources.size() - 1;
      const int roll = percent(b.rng);
      if (live) {
        if (roll < 55) r.live_status = 200;
        else if (roll < 60) r.live_status = 204;
        else if (roll < 63) r.live_status = 399;
        else if (roll < 66) r.live_status = 300;
        else if (roll < 76) r.head_not_allowed = true;
        else if (roll < 78) b.chain(r, 10, 200);
        else b.chain(r, 1 + roll % 3, 200);
      } else if (timeouts_left > 0) {
        --timeouts_left;
        r.directive = LiveDirective::Timeout;
      } else {
        if (roll < 30) r.live_status = 404;
        else if (roll < 40) r.live_status = 410;
        else if (roll < 50) r.live_status = 500;
        else if (roll < 55) r.live_status = 403;
        else if (roll < 58) r.live_status = 400;
        else if (roll < 68) r.directive = LiveDirective::Refuse;
        else if (roll < 76) b.chain(r, 1 + roll % 2, 404);
        else if (roll < 82) b.chain(r, 1, std::nullopt);
        else if (roll < 86) b.chain(r, 11, 200);
        else {
          r.live_status = 405;
          r.head_not_allowed = true;
        }
      }

      CitationRecord rec;
      rec.paper_id = "paper-" + std::to_string(serial);
      const auto pub = reference + std::chrono::days(pub_day(b.rng));
      if (roll % 10 == 0) {
        const std::chrono::year_month_day ymd{pub};
        rec.publication_date = {std::chrono::sys_days{ymd.year() / ymd.month() / 1}, DatePrecision::Month};
      } else {
        rec.publication_date = {pub, DatePrecision::Day};
      }
      const auto pub_time = midnight(rec.publication_date.day);
      rec.subjects = {subjects[serial % subjects.size()]};
      if (serial % 5 == 0) rec.subjects.push_back(subjects[(serial + 1) % subjects.size()]);

      if (archived) {
        std::set<UtcTime> snaps;
        if (roll % 7 == 0 && pub_time - std::chrono::days(10) > lower) {
          // Equidistant pair: the earlier one must win.
          snaps.insert(pub_time - std::chrono::days(10));
          snaps.insert(pub_time + std::chrono::days(10));
        }
        for (int k = snapshot_count(b.rng); k > 0; --k) {
          const auto t = pub_time + std::chrono::seconds(offset_seconds(b.rng));
          snaps.insert(std::clamp(t, lower, upper));
        }
        b.scenario.resources[index].snapshots.assign(snaps.begin(), snaps.end());
      }

      // Cited forms differ from the canonical one but normalize onto it.
      std::string raw;
      switch (serial % 5) {
        case 0: raw = canonical; break;
        case 1: raw = "http://" + to_upper_ascii(host) + path; break;
        case 2: raw = "http://" + host + ":80" + path; break;
        case 3: raw = canonical + "#cited"; break;
        default: raw = host + path; break;
      }
      rec.url = url(canonical);
      out.raw_urls.push_back(raw);
      out.records.push_back(std::move(rec));
    }
  }
  out.scenario = std::move(b.scenario);
  return out;
}

AuditResult audit_against(const SimServer& server, std::span<const CitationRecord> records, const SimAudit& setup) {
  TransportOptions origin_options;
  origin_options.timeout = setup.client_timeout;
  origin_options.proxy = server.address();
  TransportOptions archive_options;
  archive_options.timeout = setup.client_timeout;
  NetworkTransport origin(origin_options);
  NetworkTransport archive(archive_options);

  auto config = setup.config;
  config.endpoint.timemap_template = server.base_url() + "/timemap/link/{url}";
  config.endpoint.timegate_template = server.base_url() + "/timegate/{url}";
  config.probe.clock = [t = server.scenario().clock] { return t; };
  return run_audit(records, origin, archive, config);
}

RetryPolicy quick_retry() {
  RetryPolicy p;
  p.max_attempts = 3;
  p.initial_backoff = std::chrono::milliseconds(10);
  p.deadline = std::chrono::milliseconds(5000);
  return p;
}

Counts recount(std::span<const AuditOutcome> outcomes) {
  Counts c{};
  for (const auto& o : outcomes) {
    if (o.reachable && o.archived) ++c[0];
    if (o.reachable && !o.archived) ++c[1];
    if (!o.reachable && o.archived) ++c[2];
    if (!o.reachable && !o.archived) ++c[3];
  }
  return c;
}

}  // namespace linkaudit::testing

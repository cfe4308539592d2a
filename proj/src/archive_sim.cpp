#include "linkaudit/archive_sim.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "linkaudit/http.hpp"
#include "linkaudit/text.hpp"

namespace linkaudit {

// ---------------------------------------------------------------- scenario

const SimResource* Scenario::find(std::string_view url) const {
  for (const auto& r : resources)
    if (r.url == url) return &r;
  return nullptr;
}

namespace {

using nlohmann::ordered_json;

struct LineContext {
  std::string_view source;
  std::size_t line;
  std::string resource;

  [[noreturn]] void fail(const std::string& what) const {
    throw LoadError(std::string(source), line, resource.empty() ? what : "resource " + resource + ": " + what);
  }
};

bool is_http_url(std::string_view url) {
  const auto parts = split_url(url);
  return parts && parts->scheme == "http";
}

SimResource parse_resource(const ordered_json& doc, LineContext& ctx) {
  SimResource r;
  const auto url = doc.find("url");
  if (url == doc.end() || !url->is_string()) ctx.fail("missing string field 'url'");
  r.url = url->get<std::string>();
  ctx.resource = r.url;
  if (!is_http_url(r.url)) ctx.fail("url must be an absolute http URL");

  if (const auto it = doc.find("status"); it != doc.end()) {
    if (it->is_number_integer()) {
      r.live_status = it->get<int>();
      if (r.live_status < 100 || r.live_status > 599) ctx.fail("status out of range");
    } else if (*it == "timeout") {
      r.directive = LiveDirective::Timeout;
    } else if (*it == "refuse") {
      r.directive = LiveDirective::Refuse;
    } else {
      ctx.fail("status must be an integer, \"timeout\" or \"refuse\"");
    }
  }
  if (const auto it = doc.find("redirect_to"); it != doc.end() && !it->is_null()) {
    if (!it->is_string() || !is_http_url(it->get<std::string>())) ctx.fail("redirect_to must be an absolute http URL");
    if (r.directive != LiveDirective::Status || r.live_status / 100 != 3) ctx.fail("redirect_to needs a 3xx status");
    r.redirect_to = it->get<std::string>();
  }
  if (const auto it = doc.find("snapshots"); it != doc.end()) {
    if (!it->is_array()) ctx.fail("snapshots must be a list");
    for (const auto& s : *it) {
      const auto t = s.is_string() ? parse_iso_datetime(s.get<std::string>()) : std::nullopt;
      if (!t) ctx.fail("bad snapshot datetime " + s.dump());
      if (!r.snapshots.empty() && *t <= r.snapshots.back()) ctx.fail("snapshots are not strictly increasing");
      r.snapshots.push_back(*t);
    }
  }
  if (const auto it = doc.find("latency_ms"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long>() < 0) ctx.fail("latency_ms must be a non-negative integer");
    r.latency = std::chrono::milliseconds(it->get<long>());
  }
  if (const auto it = doc.find("head_not_allowed"); it != doc.end()) {
    if (!it->is_boolean()) ctx.fail("head_not_allowed must be a boolean");
    r.head_not_allowed = it->get<bool>();
  }
  if (const auto it = doc.find("archive"); it != doc.end()) {
    if (*it == "ok") r.archive_fault = ArchiveFault::None;
    else if (*it == "timeout") r.archive_fault = ArchiveFault::Timeout;
    else if (*it == "error") r.archive_fault = ArchiveFault::Error;
    else ctx.fail("archive must be \"ok\", \"timeout\" or \"error\"");
  }
  return r;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Scenario scenario;
  bool seen_settings = false;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    LineContext ctx{source, line_no, {}};
    const auto doc = ordered_json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) ctx.fail("not a JSON object");

    if (!doc.contains("url")) {
      if (seen_settings) ctx.fail("settings given twice");
      seen_settings = true;
      if (const auto it = doc.find("clock"); it != doc.end()) {
        const auto t = it->is_string() ? parse_iso_datetime(it->get<std::string>()) : std::nullopt;
        if (!t) ctx.fail("bad clock");
        scenario.clock = *t;
      }
      if (const auto it = doc.find("archive_host"); it != doc.end()) {
        if (!it->is_string() || it->get<std::string>().empty()) ctx.fail("bad archive_host");
        scenario.archive_host = to_lower(it->get<std::string>());
      }
      if (const auto it = doc.find("timeout_hold_ms"); it != doc.end()) {
        if (!it->is_number_integer() || it->get<long>() <= 0) ctx.fail("timeout_hold_ms must be positive");
        scenario.timeout_hold = std::chrono::milliseconds(it->get<long>());
      }
      continue;
    }

    auto resource = parse_resource(doc, ctx);
    const auto [it, fresh] = first_line.emplace(resource.url, line_no);
    if (!fresh) ctx.fail("duplicate url (first seen on line " + std::to_string(it->second) + ")");
    scenario.resources.push_back(std::move(resource));
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.string());
}

std::string serialize_scenario(const Scenario& scenario) {
  std::string out;
  ordered_json settings;
  settings["clock"] = format_iso_datetime(scenario.clock);
  settings["archive_host"] = scenario.archive_host;
  settings["timeout_hold_ms"] = scenario.timeout_hold.count();
  out += settings.dump() + "\n";
  for (const auto& r : scenario.resources) {
    ordered_json doc;
    doc["url"] = r.url;
    switch (r.directive) {
      case LiveDirective::Status: doc["status"] = r.live_status; break;
      case LiveDirective::Timeout: doc["status"] = "timeout"; break;
      case LiveDirective::Refuse: doc["status"] = "refuse"; break;
    }
    if (r.redirect_to) doc["redirect_to"] = *r.redirect_to;
    auto& snaps = doc["snapshots"] = ordered_json::array();
    for (auto t : r.snapshots) snaps.push_back(format_iso_datetime(t));
    if (r.latency.count()) doc["latency_ms"] = r.latency.count();
    if (r.head_not_allowed) doc["head_not_allowed"] = true;
    if (r.archive_fault == ArchiveFault::Timeout) doc["archive"] = "timeout";
    if (r.archive_fault == ArchiveFault::Error) doc["archive"] = "error";
    out += doc.dump() + "\n";
  }
  return out;
}

std::string memento_uri(std::string_view archive_host, UtcTime at, std::string_view url) {
  return "http://" + std::string(archive_host) + "/memento/" + format_compact_timestamp(at) + "/" + std::string(url);
}

TimeMap sim_timemap(const Scenario& scenario, const SimResource& resource) {
  TimeMap tm;
  tm.original_uri = resource.url;
  tm.self_uri = "http://" + scenario.archive_host + "/timemap/link/" + resource.url;
  tm.timegate_uri = "http://" + scenario.archive_host + "/timegate/" + resource.url;
  for (auto t : resource.snapshots) tm.mementos.push_back({memento_uri(scenario.archive_host, t, resource.url), t});
  return tm;
}

// ------------------------------------------------------------------ oracle

std::vector<AuditOutcome> ground_truth(const Scenario& scenario, std::span<const CitationRecord> records) {
  std::unordered_map<std::string_view, const SimResource*> index;
  for (const auto& r : scenario.resources) index.emplace(r.url, &r);

  std::vector<AuditOutcome> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    const auto url = record.url.str();
    const auto found = index.find(url);
    if (found == index.end()) throw OracleError("record URL not in scenario: " + url);
    const SimResource& resource = *found->second;

    bool reachable = false;
    const SimResource* cur = &resource;
    for (int followed = 0; cur;) {
      if (cur->directive != LiveDirective::Status) break;
      if (!cur->redirect_to) {
        reachable = cur->live_status < 400;
        break;
      }
      if (followed == 10) break;
      ++followed;
      const auto next = index.find(*cur->redirect_to);
      cur = next == index.end() ? nullptr : next->second;  // unknown target answers 404
    }

    AuditOutcome o;
    o.record = record;
    o.reachable = reachable;
    o.archived = !resource.snapshots.empty();
    if (o.archived) {
      const auto target = midnight(record.publication_date.day);
      auto distance = [&](UtcTime t) { return t > target ? t - target : target - t; };
      UtcTime best = resource.snapshots.front();
      for (auto t : resource.snapshots)
        if (distance(t) < distance(best) || (distance(t) == distance(best) && t < best)) best = t;
      o.closest = Memento{memento_uri(scenario.archive_host, best, url), best};
      const auto seconds = (best - target).count();
      o.delta_days = seconds / 86400 - (seconds % 86400 < 0 ? 1 : 0);
    }
    if (o.reachable)
      o.availability = o.archived ? AvailabilityClass::LiveArchived : AvailabilityClass::LiveUnarchived;
    else
      o.availability = o.archived ? AvailabilityClass::GoneArchived : AvailabilityClass::GoneUnarchived;
    out.push_back(std::move(o));
  }
  return out;
}

// ------------------------------------------------------------------ server

namespace {

using SteadyClock = std::chrono::steady_clock;

std::string_view reason_phrase(int status) {
  switch (status) {
    case 200: return "OK";
    case 204: return "No Content";
    case 301: return "Moved Permanently";
    case 302: return "Found";
    case 303: return "See Other";
    case 307: return "Temporary Redirect";
    case 308: return "Permanent Redirect";
    case 400: return "Bad Request";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 410: return "Gone";
    case 500: return "Internal Server Error";
    case 503: return "Service Unavailable";
    default: return "Status";
  }
}

struct Request {
  std::string method;
  std::string target;
  std::vector<std::pair<std::string, std::string>> headers;

  std::optional<std::string> header(std::string_view name) const {
    for (const auto& [k, v] : headers)
      if (iequals(k, name)) return v;
    return std::nullopt;
  }
};

struct Reply {
  enum class Kind { Respond, Hold, Refuse } kind = Kind::Respond;
  int status = 200;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds latency{0};
};

Reply respond(int status, std::string body = {}) {
  Reply r;
  r.status = status;
  r.body = body.empty() ? std::string(reason_phrase(status)) + "\n" : std::move(body);
  return r;
}

Reply hold() {
  Reply r;
  r.kind = Reply::Kind::Hold;
  return r;
}

std::optional<Request> parse_request(std::string_view head) {
  const auto lines = split(head, '\n');
  if (lines.empty()) return std::nullopt;
  const auto parts = split(trim(lines[0]), ' ');
  if (parts.size() != 3 || !istarts_with(parts[2], "HTTP/")) return std::nullopt;
  Request req{std::string(parts[0]), std::string(parts[1]), {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    req.headers.emplace_back(std::string(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))));
  }
  return req;
}

// Drops a default ":80" so proxies that always spell the port still match.
std::string canonical_authority(std::string_view authority) {
  auto out = to_lower(authority);
  if (out.size() > 3 && out.ends_with(":80")) out.resize(out.size() - 3);
  return out;
}

}  // namespace

struct SimServer::Impl {
  Scenario scenario;
  std::unordered_map<std::string, const SimResource*> index;
  int listen_fd = -1;
  std::string bind_host;
  std::uint16_t port = 0;

  std::atomic<bool> stopping{false};
  std::mutex queue_mutex;
  std::condition_variable queue_cv;
  std::deque<int> pending;
  std::thread acceptor;
  std::vector<std::thread> workers;

  mutable std::mutex stats_mutex;
  SimStats stats;
  std::map<std::string, unsigned> in_flight;
  unsigned origin_in_flight = 0;
  unsigned stats_generation = 0;

  std::string own_authority() const { return bind_host + ":" + std::to_string(port); }

  bool is_archive(const std::string& authority) const {
    return authority == scenario.archive_host || authority == own_authority() ||
           authority == "localhost:" + std::to_string(port);
  }

  std::size_t begin(const std::string& key, bool origin, unsigned& generation) {
    std::lock_guard lock(stats_mutex);
    generation = stats_generation;
    ++stats.requests;
    auto& n = ++in_flight[key];
    auto& high = stats.max_in_flight_per_host[key];
    high = std::max(high, n);
    if (origin) stats.max_in_flight_origin = std::max(stats.max_in_flight_origin, ++origin_in_flight);
    auto& spans = stats.spans[key];
    spans.push_back({SteadyClock::now(), {}});
    return spans.size() - 1;
  }

  void end(const std::string& key, bool origin, std::size_t span, unsigned generation) {
    std::lock_guard lock(stats_mutex);
    --in_flight[key];
    if (origin) --origin_in_flight;
    auto& spans = stats.spans[key];
    if (generation == stats_generation && span < spans.size()) spans[span].end = SteadyClock::now();
  }

  // Waits up to `limit`; returns false once the peer has closed.
  bool wait_on_peer(int fd, std::chrono::milliseconds limit) {
    const auto deadline = SteadyClock::now() + limit;
    while (!stopping) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - SteadyClock::now());
      if (left.count() <= 0) return true;
      pollfd p{fd, POLLIN, 0};
      const int rc = ::poll(&p, 1, static_cast<int>(std::min<long>(left.count(), 100)));
      if (rc > 0) {
        char buf[512];
        const auto n = ::recv(fd, buf, sizeof buf, MSG_DONTWAIT);
        if (n == 0 || (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK)) return false;
      }
    }
    return false;
  }

  Reply archive_route(const Request& req, std::string_view path) {
    const auto lookup = [&](std::string_view url) -> const SimResource* {
      const auto it = index.find(std::string(url));
      return it == index.end() ? nullptr : it->second;
    };
    if (path == "/_sim/health") {
      ordered_json doc{{"status", "ok"}, {"resources", scenario.resources.size()}};
      auto r = respond(200, doc.dump() + "\n");
      r.headers.emplace_back("Content-Type", "application/json");
      return r;
    }
    if (path.starts_with("/timemap/link/")) {
      const auto* res = lookup(path.substr(14));
      if (res && res->archive_fault == ArchiveFault::Timeout) return hold();
      if (res && res->archive_fault == ArchiveFault::Error) return respond(503);
      if (!res || res->snapshots.empty()) return respond(404);
      auto r = respond(200, serialize_timemap(sim_timemap(scenario, *res)));
      r.headers.emplace_back("Content-Type", "application/link-format");
      return r;
    }
    if (path.starts_with("/timegate/")) {
      const auto url = path.substr(10);
      const auto* res = lookup(url);
      if (res && res->archive_fault == ArchiveFault::Timeout) return hold();
      if (res && res->archive_fault == ArchiveFault::Error) return respond(503);
      if (!res || res->snapshots.empty()) return respond(404);
      UtcTime desired = res->snapshots.back();
      if (const auto accept = req.header("Accept-Datetime")) {
        const auto t = parse_http_date(*accept);
        if (!t) return respond(400);
        desired = *t;
      }
      auto best = res->snapshots.front();
      auto distance = [&](UtcTime t) { return t > desired ? t - desired : desired - t; };
      for (auto t : res->snapshots)
        if (distance(t) < distance(best)) best = t;
      auto r = respond(302);
      r.headers.emplace_back("Location", memento_uri(scenario.archive_host, best, res->url));
      r.headers.emplace_back("Vary", "accept-datetime");
      r.headers.emplace_back("Link", "<" + res->url + ">; rel=\"original\", <http://" + scenario.archive_host +
                                         "/timemap/link/" + res->url + ">; rel=\"timemap\"");
      return r;
    }
    if (path.starts_with("/memento/")) {
      const auto rest = path.substr(9);
      const auto slash = rest.find('/');
      if (slash == std::string_view::npos) return respond(404);
      const auto when = parse_compact_timestamp(rest.substr(0, slash));
      const auto* res = lookup(rest.substr(slash + 1));
      if (!when || !res || !std::binary_search(res->snapshots.begin(), res->snapshots.end(), *when))
        return respond(404);
      auto r = respond(200, "memento of " + res->url + "\n");
      r.headers.emplace_back("Memento-Datetime", format_http_date(*when));
      r.headers.emplace_back("Link", "<" + res->url + ">; rel=\"original\"");
      return r;
    }
    return respond(404);
  }

  Reply origin_route(const Request& req, const std::string& url) {
    const auto it = index.find(url);
    if (it == index.end()) return respond(404);
    const auto& res = *it->second;
    Reply r;
    switch (res.directive) {
      case LiveDirective::Timeout: r.kind = Reply::Kind::Hold; return r;
      case LiveDirective::Refuse: r.kind = Reply::Kind::Refuse; return r;
      case LiveDirective::Status: break;
    }
    if (req.method == "HEAD" && res.head_not_allowed) {
      r = respond(405);
      r.headers.emplace_back("Allow", "GET");
    } else {
      r = respond(res.live_status);
      if (res.redirect_to) r.headers.emplace_back("Location", *res.redirect_to);
    }
    r.latency = res.latency;
    return r;
  }

  static void send_all(int fd, std::string_view data) {
    while (!data.empty()) {
      const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
      if (n <= 0) return;
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  void handle(int fd) {
    std::string head;
    char buf[4096];
    const auto read_deadline = SteadyClock::now() + std::chrono::seconds(5);
    while (head.find("\r\n\r\n") == std::string::npos) {
      if (stopping || head.size() > 65536 || SteadyClock::now() > read_deadline) return;
      pollfd p{fd, POLLIN, 0};
      if (::poll(&p, 1, 100) <= 0) continue;
      const auto n = ::recv(fd, buf, sizeof buf, 0);
      if (n <= 0) return;
      head.append(buf, static_cast<std::size_t>(n));
    }
    head.resize(head.find("\r\n\r\n"));
    erase_cr(head);

    const auto req = parse_request(head);
    Reply reply;
    std::string key;
    bool origin = false;
    if (!req) {
      reply = respond(400);
    } else {
      std::string authority;
      std::string path = req->target;
      if (istarts_with(req->target, "http://")) {
        const auto rest = std::string_view(req->target).substr(7);
        const auto slash = rest.find_first_of("/?");
        authority = std::string(rest.substr(0, slash));
        path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
        if (path.front() == '?') path.insert(path.begin(), '/');
      } else {
        authority = req->header("Host").value_or(own_authority());
      }
      authority = canonical_authority(authority);
      if (is_archive(authority)) {
        key = scenario.archive_host;
        reply = archive_route(*req, path);
      } else {
        key = authority;
        origin = true;
        reply = origin_route(*req, "http://" + authority + path);
      }
    }

    unsigned generation = 0;
    const auto span = key.empty() ? 0 : begin(key, origin, generation);
    const auto finish = [&] {
      if (!key.empty()) end(key, origin, span, generation);
    };

    switch (reply.kind) {
      case Reply::Kind::Refuse: {
        finish();
        linger hard{1, 0};
        ::setsockopt(fd, SOL_SOCKET, SO_LINGER, &hard, sizeof hard);
        return;
      }
      case Reply::Kind::Hold:
        wait_on_peer(fd, scenario.timeout_hold);
        finish();
        return;
      case Reply::Kind::Respond: break;
    }
    if (reply.latency.count() > 0 && !wait_on_peer(fd, reply.latency)) {
      finish();
      return;
    }

    std::string out = "HTTP/1.1 " + std::to_string(reply.status) + " " + std::string(reason_phrase(reply.status)) + "\r\n";
    for (const auto& [k, v] : reply.headers) out += k + ": " + v + "\r\n";
    const bool bodiless = reply.status == 204 || reply.status == 304 || reply.status < 200;
    if (!bodiless) out += "Content-Length: " + std::to_string(reply.body.size()) + "\r\n";
    out += "Connection: close\r\n\r\n";
    if (req && req->method != "HEAD" && !bodiless) out += reply.body;
    finish();
    send_all(fd, out);
    ::shutdown(fd, SHUT_WR);
    wait_on_peer(fd, std::chrono::milliseconds(500));
  }

  static void erase_cr(std::string& s) { std::erase(s, '\r'); }

  void accept_loop() {
    while (!stopping) {
      pollfd p{listen_fd, POLLIN, 0};
      if (::poll(&p, 1, 100) <= 0) continue;
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) continue;
      {
        std::lock_guard lock(queue_mutex);
        pending.push_back(fd);
      }
      queue_cv.notify_one();
    }
  }

  void worker_loop() {
    while (true) {
      int fd;
      {
        std::unique_lock lock(queue_mutex);
        queue_cv.wait(lock, [&] { return stopping || !pending.empty(); });
        if (pending.empty()) return;
        fd = pending.front();
        pending.pop_front();
      }
      handle(fd);
      ::close(fd);
    }
  }
};

SimServer::SimServer(Scenario scenario, std::string_view bind_host, std::uint16_t port, unsigned workers)
    : impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.scenario = std::move(scenario);
  for (const auto& r : im.scenario.resources) im.index.emplace(r.url, &r);

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string host(bind_host);
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &found) != 0 || !found)
    throw Error("cannot resolve bind host '" + host + "'");
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(found->ai_addr);
  ::freeaddrinfo(found);
  addr.sin_port = htons(port);

  im.listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (im.listen_fd < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(im.listen_fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  if (::bind(im.listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(im.listen_fd, 512) != 0) {
    const std::string why = std::strerror(errno);
    ::close(im.listen_fd);
    throw Error("cannot bind " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(im.listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
  im.port = ntohs(addr.sin_port);
  char text[INET_ADDRSTRLEN];
  ::inet_ntop(AF_INET, &addr.sin_addr, text, sizeof text);
  im.bind_host = text;

  for (unsigned i = 0; i < std::max(1u, workers); ++i) im.workers.emplace_back([&im] { im.worker_loop(); });
  im.acceptor = std::thread([&im] { im.accept_loop(); });
}

SimServer::~SimServer() { stop(); }

void SimServer::stop() {
  auto& im = *impl_;
  if (im.stopping.exchange(true)) return;
  im.queue_cv.notify_all();
  if (im.acceptor.joinable()) im.acceptor.join();
  for (auto& w : im.workers) w.join();
  for (int fd : im.pending) ::close(fd);
  im.pending.clear();
  ::close(im.listen_fd);
}

std::uint16_t SimServer::port() const { return impl_->port; }
std::string SimServer::address() const { return impl_->own_authority(); }
std::string SimServer::base_url() const { return "http://" + address(); }
const Scenario& SimServer::scenario() const { return impl_->scenario; }

SimStats SimServer::stats() const {
  std::lock_guard lock(impl_->stats_mutex);
  return impl_->stats;
}

void SimServer::reset_stats() {
  std::lock_guard lock(impl_->stats_mutex);
  impl_->stats = {};
  ++impl_->stats_generation;
}

std::unique_ptr<SimServer> serve(Scenario scenario, std::string_view bind_address) {
  const auto colon = bind_address.rfind(':');
  std::string host = "127.0.0.1";
  std::string_view port_text = bind_address;
  if (colon != std::string_view::npos) {
    if (colon > 0) host = std::string(bind_address.substr(0, colon));
    port_text = bind_address.substr(colon + 1);
  }
  unsigned port = 0;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || end != port_text.data() + port_text.size() || port > 65535)
    throw UsageError("bad bind address '" + std::string(bind_address) + "' (expected host:port)");
  return std::make_unique<SimServer>(std::move(scenario), host, static_cast<std::uint16_t>(port));
}

}  // namespace linkaudit

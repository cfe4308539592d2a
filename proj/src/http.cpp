#include "linkaudit/http.hpp"

#include <netdb.h>
#include <sys/socket.h>

#include <stdexcept>

#ifdef LINKAUDIT_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "linkaudit/text.hpp"

namespace linkaudit {
namespace {

bool resolves(const std::string& host) {
  addrinfo hints{};
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* info = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &info);
  if (info) ::freeaddrinfo(info);
  return rc == 0;
}

HeaderList copy_headers(const httplib::Headers& headers) {
  HeaderList out;
  out.reserve(headers.size());
  for (const auto& [name, value] : headers) out.emplace_back(name, value);
  return out;
}

}  // namespace

std::optional<std::string> HttpResponse::header(std::string_view name) const {
  for (const auto& [key, value] : headers)
    if (iequals(key, name)) return value;
  return std::nullopt;
}

std::string_view to_string(TransportFailure failure) {
  switch (failure) {
    case TransportFailure::Timeout: return "timeout";
    case TransportFailure::ConnectionRefused: return "connection_refused";
    case TransportFailure::DnsFailure: return "dns_failure";
  }
  return "unknown";
}

std::optional<UrlParts> split_url(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  UrlParts parts;
  parts.scheme = to_lower(url.substr(0, sep));
  if (parts.scheme != "http" && parts.scheme != "https") return std::nullopt;
  const auto rest = url.substr(sep + 3);
  const auto auth_end = rest.find_first_of("/?#");
  const auto authority = rest.substr(0, auth_end);
  std::string_view target = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);
  if (const auto hash = target.find('#'); hash != std::string_view::npos) target = target.substr(0, hash);
  parts.target = target.empty() || target.front() != '/' ? "/" + std::string(target) : std::string(target);
  parts.port = parts.scheme == "https" ? 443 : 80;
  std::string_view host = authority;
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    const auto digits = authority.substr(colon + 1);
    if (!digits.empty()) {
      int port = 0;
      for (char c : digits) {
        if (!ascii_isdigit(c) || port > 65535) return std::nullopt;
        port = port * 10 + (c - '0');
      }
      if (port == 0 || port > 65535) return std::nullopt;
      parts.port = port;
    }
  }
  if (host.empty() || host.find('@') != std::string_view::npos) return std::nullopt;
  parts.host = to_lower(host);
  return parts;
}

std::string authority_of(std::string_view url) {
  const auto parts = split_url(url);
  if (!parts) return {};
  const int default_port = parts->scheme == "https" ? 443 : 80;
  return parts->port == default_port ? parts->host : parts->host + ":" + std::to_string(parts->port);
}

std::string resolve_reference(std::string_view base, std::string_view reference) {
  reference = trim(reference);
  // Absolute reference.
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const char c = reference[i];
    if (c == ':') {
      if (i > 0) return std::string(reference);
      break;
    }
    if (!(ascii_isalnum(c) || c == '+' || c == '-' || c == '.')) break;
  }
  const auto sep = base.find("://");
  if (sep == std::string_view::npos) return std::string(reference);
  const auto scheme = base.substr(0, sep);
  const auto after = base.substr(sep + 3);
  const auto auth_end = after.find_first_of("/?#");
  const auto origin = base.substr(0, sep + 3 + (auth_end == std::string_view::npos ? after.size() : auth_end));
  if (reference.starts_with("//")) return std::string(scheme) + ":" + std::string(reference);
  if (reference.starts_with('/')) return std::string(origin) + std::string(reference);

  std::string_view path = auth_end == std::string_view::npos ? std::string_view{"/"} : after.substr(auth_end);
  if (const auto cut = path.find_first_of("?#"); cut != std::string_view::npos) path = path.substr(0, cut);
  if (path.empty()) path = "/";
  if (reference.empty()) return std::string(origin) + std::string(path);
  if (reference.starts_with('?')) return std::string(origin) + std::string(path) + std::string(reference);
  const auto dir = path.substr(0, path.rfind('/') + 1);
  return std::string(origin) + std::string(dir) + std::string(reference);
}

NetworkTransport::NetworkTransport(TransportOptions options) : options_(std::move(options)) {}

TransportResult NetworkTransport::send(const HttpRequest& request) {
  const auto parts = split_url(request.url);
  if (!parts) throw std::invalid_argument("not an absolute http(s) URL: " + request.url);

  httplib::Client client(parts->scheme + "://" + parts->host + ":" + std::to_string(parts->port));
  const auto timeout = options_.timeout;
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_keep_alive(false);
  client.set_follow_location(false);
  client.set_url_encode(false);
#ifdef LINKAUDIT_WITH_TLS
  // Availability auditing: an expired or self-signed certificate still
  // means the resource is served.
  client.enable_server_certificate_verification(false);
#endif
  if (options_.proxy) {
    const auto colon = options_.proxy->rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("proxy must be host:port");
    client.set_proxy(options_.proxy->substr(0, colon), std::stoi(options_.proxy->substr(colon + 1)));
  }

  httplib::Headers headers{{"User-Agent", options_.user_agent}};
  for (const auto& [name, value] : request.headers) headers.emplace(name, value);

  std::optional<HttpResponse> captured;
  const auto started = std::chrono::steady_clock::now();
  httplib::Result result = [&] {
    if (request.method == "HEAD") return client.Head(parts->target, headers);
    if (request.want_body) return client.Get(parts->target, headers);
    return client.Get(
        parts->target, headers,
        [&](const httplib::Response& response) {
          captured = HttpResponse{response.status, copy_headers(response.headers), {}};
          return true;
        },
        [](const char*, std::size_t) { return false; });
  }();

  if (result) return HttpResponse{result->status, copy_headers(result->headers), std::move(result->body)};
  if (captured) return std::move(*captured);

  const auto elapsed = std::chrono::steady_clock::now() - started;
  switch (result.error()) {
    case httplib::Error::ConnectionTimeout:
      return TransportFailure::Timeout;
    case httplib::Error::Connection:
      if (!options_.proxy && !resolves(parts->host)) return TransportFailure::DnsFailure;
      return TransportFailure::ConnectionRefused;
    case httplib::Error::Read:
    case httplib::Error::Write:
      // httplib reports an expired read timeout and a peer hang-up the same way.
      return elapsed >= timeout * 9 / 10 ? TransportFailure::Timeout : TransportFailure::ConnectionRefused;
    default:
      return TransportFailure::ConnectionRefused;
  }
}

}  // namespace linkaudit

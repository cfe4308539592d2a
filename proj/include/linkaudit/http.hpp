#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace linkaudit {

using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct HttpRequest {
  std::string method = "GET";
  /// Absolute http(s) URL.
  std::string url;
  HeaderList headers;
  /// When false the body of a GET is abandoned after the headers arrive.
  bool want_body = true;
};

struct HttpResponse {
  int status = 0;
  HeaderList headers;
  std::string body;

  /// First header with this name, compared case-insensitively.
  std::optional<std::string> header(std::string_view name) const;
};

/// Network-level failures, before any HTTP status was received.
enum class TransportFailure { Timeout, ConnectionRefused, DnsFailure };

std::string_view to_string(TransportFailure failure);

using TransportResult = std::variant<HttpResponse, TransportFailure>;

/// Sends one request without following redirects. Implementations must be
/// safe to call from several threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual TransportResult send(const HttpRequest& request) = 0;
};

struct TransportOptions {
  std::chrono::milliseconds timeout{15000};
  std::string user_agent = "linkaudit/0.1";
  /// "host:port" of a forward HTTP proxy, if any.
  std::optional<std::string> proxy;
};

/// HttpTransport over cpp-httplib. One connection per request.
class NetworkTransport final : public HttpTransport {
 public:
  explicit NetworkTransport(TransportOptions options = {});
  TransportResult send(const HttpRequest& request) override;

 private:
  TransportOptions options_;
};

struct UrlParts {
  std::string scheme;
  std::string host;
  int port = 0;
  /// Path plus query, at least "/".
  std::string target;
};

std::optional<UrlParts> split_url(std::string_view url);

/// Lowercase "host" or "host:port" (port omitted when default) of an
/// absolute URL; empty when it cannot be parsed.
std::string authority_of(std::string_view url);

/// Resolves a Location header value against the URL it came from.
std::string resolve_reference(std::string_view base, std::string_view reference);

}  // namespace linkaudit

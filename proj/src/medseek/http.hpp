#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace medseek::http {

struct Options {
  std::chrono::milliseconds timeout{15000};
  long max_redirects = 5;
  std::vector<std::string> headers;  // "Name: value"
  std::string user_agent = "medseek/1.0";
};

struct Response {
  long status = 0;
  std::string body;
  std::string content_type;
  std::string effective_url;
  std::optional<std::chrono::milliseconds> retry_after;
};

// Transport failures (DNS, connect, timeout, too many redirects) throw
// Error(ProviderUnavailable). HTTP error statuses are returned, not thrown.
Response get(const std::string& url, const Options& opts = {});
Response post_json(const std::string& url, const std::string& body, const Options& opts = {});

// Minimal syntactic check: http(s) scheme followed by a non-empty host.
bool is_http_url(const std::string& url);

}  // namespace medseek::http

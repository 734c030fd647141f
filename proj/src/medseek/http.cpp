#include "medseek/http.hpp"

#include <curl/curl.h>

#include <cctype>
#include <memory>
#include <mutex>

#include "medseek/error.hpp"
#include "medseek/text.hpp"

namespace medseek::http {

namespace {

void ensure_global_init() {
  static std::once_flag once;
  std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

size_t on_body(char* data, size_t size, size_t n, void* user) {
  static_cast<std::string*>(user)->append(data, size * n);
  return size * n;
}

size_t on_header(char* data, size_t size, size_t n, void* user) {
  auto* resp = static_cast<Response*>(user);
  std::string_view line(data, size * n);
  if (text::starts_with_ci(line, "retry-after:")) {
    auto value = text::trim(line.substr(12));
    try {
      resp->retry_after = std::chrono::seconds(std::stol(value));
    } catch (...) {
      // HTTP-date form is ignored.
    }
  }
  return size * n;
}

Response perform(const std::string& url, const std::string* post_body, const Options& opts) {
  ensure_global_init();
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
  if (!curl) throw Error(ErrorCode::ProviderUnavailable, "curl init failed");

  Response resp;
  curl_slist* headers = nullptr;
  for (const auto& h : opts.headers) headers = curl_slist_append(headers, h.c_str());
  if (post_body) headers = curl_slist_append(headers, "Content-Type: application/json");
  std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> header_guard(headers,
                                                                           &curl_slist_free_all);

  CURL* h = curl.get();
  curl_easy_setopt(h, CURLOPT_URL, url.c_str());
  curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(h, CURLOPT_MAXREDIRS, opts.max_redirects);
  curl_easy_setopt(h, CURLOPT_TIMEOUT_MS, static_cast<long>(opts.timeout.count()));
  curl_easy_setopt(h, CURLOPT_NOSIGNAL, 1L);
  curl_easy_setopt(h, CURLOPT_USERAGENT, opts.user_agent.c_str());
  curl_easy_setopt(h, CURLOPT_ACCEPT_ENCODING, "");
  curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, on_body);
  curl_easy_setopt(h, CURLOPT_WRITEDATA, &resp.body);
  curl_easy_setopt(h, CURLOPT_HEADERFUNCTION, on_header);
  curl_easy_setopt(h, CURLOPT_HEADERDATA, &resp);
  if (headers) curl_easy_setopt(h, CURLOPT_HTTPHEADER, headers);
  if (post_body) {
    curl_easy_setopt(h, CURLOPT_POST, 1L);
    curl_easy_setopt(h, CURLOPT_POSTFIELDS, post_body->c_str());
    curl_easy_setopt(h, CURLOPT_POSTFIELDSIZE, static_cast<long>(post_body->size()));
  }

  auto rc = curl_easy_perform(h);
  if (rc != CURLE_OK)
    throw Error(ErrorCode::ProviderUnavailable, url + ": " + curl_easy_strerror(rc));

  curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &resp.status);
  char* ct = nullptr;
  if (curl_easy_getinfo(h, CURLINFO_CONTENT_TYPE, &ct) == CURLE_OK && ct) resp.content_type = ct;
  char* eff = nullptr;
  if (curl_easy_getinfo(h, CURLINFO_EFFECTIVE_URL, &eff) == CURLE_OK && eff) resp.effective_url = eff;
  return resp;
}

}  // namespace

Response get(const std::string& url, const Options& opts) {
  return perform(url, nullptr, opts);
}

Response post_json(const std::string& url, const std::string& body, const Options& opts) {
  return perform(url, &body, opts);
}

bool is_http_url(const std::string& url) {
  std::string_view rest;
  if (text::starts_with_ci(url, "http://"))
    rest = std::string_view(url).substr(7);
  else if (text::starts_with_ci(url, "https://"))
    rest = std::string_view(url).substr(8);
  else
    return false;
  if (rest.empty() || rest[0] == '/' || rest[0] == '?' || rest[0] == '#') return false;
  for (char c : rest)
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace medseek::http

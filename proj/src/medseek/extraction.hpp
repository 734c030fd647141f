#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "medseek/http.hpp"
#include "medseek/run_store.hpp"
#include "medseek/serp.hpp"

namespace medseek {

enum class PageStatus { Ok, FetchFailed, EmptyAfterStrip };

std::string_view to_string(PageStatus s);
PageStatus page_status_from_string(std::string_view s);

// Plain text of one result page. Ok implies non-empty text; text never holds
// markup or more than two consecutive newlines.
struct PageText {
  std::string url;
  std::string text;
  std::string fetched_at;
  PageStatus status = PageStatus::FetchFailed;
};

struct Passage {
  std::string source_url;
  int index = 0;  // 0-based within the page
  std::string text;
  std::pair<size_t, size_t> word_span;  // [start, end) into the page's words

  bool operator==(const Passage&) const = default;
};

// Drops script/style/nav/header/footer/aside (and head, noscript, template,
// svg, iframe) plus comments, turns block elements into line breaks, decodes
// entities and normalizes whitespace. Never throws; worst case "".
std::string html_to_text(std::string_view html);

// Sliding windows of `window_words` words every `stride_words` words. The last
// window is emitted only if it contributes at least one new word.
std::vector<Passage> split_passages(const PageText& page, int window_words = 120, int stride_words = 60);

struct RawPage {
  long status = 0;
  std::string content_type;
  std::string body;
};

class PageSource {
 public:
  virtual ~PageSource() = default;
  // Throws on transport failure; HTTP errors come back in RawPage::status.
  virtual RawPage get(const std::string& url) = 0;
  virtual bool is_live() const = 0;
};

class LivePageSource final : public PageSource {
 public:
  explicit LivePageSource(http::Options opts = {}) : opts_(std::move(opts)) {}
  RawPage get(const std::string& url) override;
  bool is_live() const override { return true; }

 private:
  http::Options opts_;
};

// <dir>/index.json maps URLs to {"file", "status", "content_type"}; unknown
// URLs answer 404.
class FixturePageSource final : public PageSource {
 public:
  explicit FixturePageSource(std::filesystem::path dir);
  RawPage get(const std::string& url) override;
  bool is_live() const override { return false; }

 private:
  std::filesystem::path dir_;
  nlohmann::json index_;
};

// Network and HTTP failures become status FetchFailed, never exceptions.
// Throws InvalidUrl for anything that is not an http(s) URL.
PageText fetch_page(const std::string& url, PageSource& source);

struct PageRecord {
  PageText page;
  std::string raw;
};

nlohmann::json to_json(const PageRecord& rec);
PageRecord page_record_from_json(const nlohmann::json& j);

std::string page_cache_key(const std::string& url);

// Content-addressed by canonical URL. Offline mode with a live source turns a
// miss into OfflineCacheMiss.
class PageFetcher {
 public:
  PageFetcher(std::shared_ptr<PageSource> source, RunStore& store, CacheOptions opts = {});

  PageText fetch(const std::string& url);

  // Fetches distinct URLs with at most `max_in_flight` requests in flight,
  // one request at a time per host.
  std::vector<PageText> fetch_all(const std::vector<std::string>& urls, size_t max_in_flight = 8);

  size_t source_calls() const { return calls_.load(); }

 private:
  std::shared_ptr<PageSource> source_;
  RunStore& store_;
  CacheOptions opts_;
  std::atomic<size_t> calls_{0};
  std::mutex host_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> host_locks_;

  std::shared_ptr<std::mutex> lock_for_host(const std::string& url);
};

}  // namespace medseek

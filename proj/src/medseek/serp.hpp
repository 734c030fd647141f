#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "medseek/run_store.hpp"

namespace medseek {

enum class Engine { Google, Bing, Yahoo, DuckDuckGo };

std::string_view to_string(Engine e);
Engine engine_from_string(std::string_view s);
const std::vector<Engine>& all_engines();

struct SerpEntry {
  int rank = 0;  // 1-based
  std::string url;
  std::string title;
  std::optional<std::string> snippet;

  bool operator==(const SerpEntry&) const = default;
};

// Organic top-k for one (engine, topic). Ranks run 1..n without gaps, n <= 20.
struct Serp {
  Engine engine = Engine::Google;
  int topic_id = 0;
  std::vector<SerpEntry> entries;
  std::string retrieved_at;

  bool operator==(const Serp&) const = default;
};

nlohmann::json to_json(const Serp& serp);
Serp serp_from_json(const nlohmann::json& j);

// Lowercases scheme and host, drops the fragment and any trailing slash.
std::string canonicalize_url(std::string_view url);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

// What an adapter hands back before filtering and re-ranking.
struct RawResult {
  std::string url;
  std::string title;
  std::optional<std::string> snippet;
  bool sponsored = false;
};

struct SearchRequest {
  int topic_id = 0;
  std::string question;
  int depth = 20;
};

class SerpProvider {
 public:
  virtual ~SerpProvider() = default;
  // Results in engine order. Throws ProviderUnavailable or RateLimitedError.
  virtual std::vector<RawResult> fetch(const SearchRequest& req) = 0;
  // Live providers touch the network and are forbidden in offline mode.
  virtual bool is_live() const = 0;
};

// Reads <dir>/<topic_id>.json, each holding a Serp object (entries may carry
// a "sponsored" flag).
class FixtureSerpProvider final : public SerpProvider {
 public:
  explicit FixtureSerpProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::vector<RawResult> fetch(const SearchRequest& req) override;
  bool is_live() const override { return false; }

 private:
  std::filesystem::path dir_;
};

// Official-API style adapter: GET <endpoint>?q=<question>&num=<depth> with a
// bearer key, expecting {"results"|"organic_results": [{url|link, title,
// snippet, sponsored}]}.
class JsonApiSerpProvider final : public SerpProvider {
 public:
  JsonApiSerpProvider(std::string endpoint, std::string api_key,
                      std::chrono::milliseconds timeout = std::chrono::seconds(15))
      : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {}
  std::vector<RawResult> fetch(const SearchRequest& req) override;
  bool is_live() const override { return true; }

 private:
  std::string endpoint_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

// Scrapes the DuckDuckGo HTML endpoint.
class DuckDuckGoHtmlProvider final : public SerpProvider {
 public:
  explicit DuckDuckGoHtmlProvider(std::string endpoint = "https://html.duckduckgo.com/html/")
      : endpoint_(std::move(endpoint)) {}
  std::vector<RawResult> fetch(const SearchRequest& req) override;
  bool is_live() const override { return true; }

 private:
  std::string endpoint_;
};

std::vector<RawResult> parse_duckduckgo_html(std::string_view html);

// Drops sponsored and non-http(s) results, removes canonical-URL duplicates
// keeping the earliest, truncates to depth and re-ranks from 1.
std::vector<SerpEntry> organic_entries(const std::vector<RawResult>& raw, int depth);

struct RateLimitPolicy {
  std::chrono::milliseconds min_interval{2000};
  int max_retries = 4;
  std::chrono::milliseconds backoff_base{1000};
};

// One engine behind its adapter. Requests are serialized through the
// engine's rate limiter; distinct clients may run concurrently.
class SerpClient {
 public:
  SerpClient(Engine engine, std::shared_ptr<SerpProvider> provider, RateLimitPolicy policy = {});

  Engine engine() const { return engine_; }
  bool is_live() const { return provider_->is_live(); }
  size_t provider_calls() const { return calls_.load(); }

  // depth must be in [1, 20]. Throws EmptySerp when nothing organic remains.
  Serp search(int topic_id, const std::string& question, int depth);

 private:
  Engine engine_;
  std::shared_ptr<SerpProvider> provider_;
  RateLimitPolicy policy_;
  std::mutex mu_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  std::atomic<size_t> calls_{0};
};

struct CacheOptions {
  bool offline = false;
  std::string run_id = "default";
};

std::string serp_cache_key(Engine engine, const std::string& question, int depth);

// Store hit returns the recorded Serp unchanged; a miss searches and persists.
Serp cached_search(SerpClient& client, int topic_id, const std::string& question, int depth,
                   RunStore& store, const CacheOptions& opts = {});

}  // namespace medseek

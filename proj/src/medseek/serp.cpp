#include "medseek/serp.hpp"

#include <cctype>
#include <set>
#include <thread>

#include "medseek/error.hpp"
#include "medseek/html.hpp"
#include "medseek/http.hpp"
#include "medseek/text.hpp"

namespace medseek {

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Google: return "google";
    case Engine::Bing: return "bing";
    case Engine::Yahoo: return "yahoo";
    case Engine::DuckDuckGo: return "duckduckgo";
  }
  return "?";
}

Engine engine_from_string(std::string_view s) {
  auto v = text::to_lower(s);
  if (v == "google") return Engine::Google;
  if (v == "bing") return Engine::Bing;
  if (v == "yahoo") return Engine::Yahoo;
  if (v == "duckduckgo" || v == "ddg") return Engine::DuckDuckGo;
  throw Error(ErrorCode::InvalidArgument, "unknown engine '" + std::string(s) + "'");
}

const std::vector<Engine>& all_engines() {
  static const std::vector<Engine> engines{Engine::Google, Engine::Bing, Engine::Yahoo,
                                           Engine::DuckDuckGo};
  return engines;
}

nlohmann::json to_json(const Serp& serp) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : serp.entries) {
    nlohmann::json j = {{"rank", e.rank}, {"url", e.url}, {"title", e.title}};
    if (e.snippet) j["snippet"] = *e.snippet;
    entries.push_back(std::move(j));
  }
  return {{"engine", to_string(serp.engine)},
          {"topic_id", serp.topic_id},
          {"entries", std::move(entries)},
          {"retrieved_at", serp.retrieved_at}};
}

Serp serp_from_json(const nlohmann::json& j) {
  try {
    Serp s;
    s.engine = engine_from_string(j.at("engine").get<std::string>());
    s.topic_id = j.at("topic_id").get<int>();
    s.retrieved_at = j.value("retrieved_at", "");
    for (const auto& e : j.at("entries")) {
      SerpEntry entry;
      entry.rank = e.at("rank").get<int>();
      entry.url = e.at("url").get<std::string>();
      entry.title = e.value("title", "");
      if (e.contains("snippet") && e["snippet"].is_string()) entry.snippet = e["snippet"].get<std::string>();
      s.entries.push_back(std::move(entry));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad Serp object: ") + e.what());
  }
}

std::string canonicalize_url(std::string_view url) {
  std::string out(url);
  if (auto hash = out.find('#'); hash != std::string::npos) out.erase(hash);
  auto scheme_end = out.find("://");
  if (scheme_end != std::string::npos) {
    auto host_end = out.find_first_of("/?", scheme_end + 3);
    if (host_end == std::string::npos) host_end = out.size();
    for (size_t i = 0; i < host_end; ++i)
      out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  }
  while (!out.empty() && out.back() == '/') out.pop_back();
  return out;
}

std::string url_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else if (s[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::vector<SerpEntry> organic_entries(const std::vector<RawResult>& raw, int depth) {
  std::vector<SerpEntry> out;
  std::set<std::string> seen;
  for (const auto& r : raw) {
    if (static_cast<int>(out.size()) >= depth) break;
    if (r.sponsored || !http::is_http_url(r.url)) continue;
    if (!seen.insert(canonicalize_url(r.url)).second) continue;
    SerpEntry e;
    e.rank = static_cast<int>(out.size()) + 1;
    e.url = r.url;
    e.title = r.title;
    e.snippet = r.snippet;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<RawResult> FixtureSerpProvider::fetch(const SearchRequest& req) {
  if (!std::filesystem::is_directory(dir_))
    throw Error(ErrorCode::ProviderUnavailable, "fixture directory missing: " + dir_.string());
  auto path = dir_ / (std::to_string(req.topic_id) + ".json");
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::ProviderUnavailable, "no recorded SERP at " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  std::vector<RawResult> out;
  for (const auto& e : doc.at("entries")) {
    RawResult r;
    r.url = e.at("url").get<std::string>();
    r.title = e.value("title", "");
    if (e.contains("snippet") && e["snippet"].is_string()) r.snippet = e["snippet"].get<std::string>();
    r.sponsored = e.value("sponsored", false);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawResult> JsonApiSerpProvider::fetch(const SearchRequest& req) {
  http::Options opts;
  opts.timeout = timeout_;
  if (!api_key_.empty()) opts.headers.push_back("Authorization: Bearer " + api_key_);
  auto sep = endpoint_.find('?') == std::string::npos ? "?" : "&";
  auto url = endpoint_ + sep + "q=" + url_encode(req.question) + "&num=" + std::to_string(req.depth);
  auto resp = http::get(url, opts);
  if (resp.status == 429)
    throw RateLimitedError("rate limited by " + endpoint_,
                           resp.retry_after.value_or(std::chrono::milliseconds(0)));
  if (resp.status != 200)
    throw Error(ErrorCode::ProviderUnavailable,
                "search API returned HTTP " + std::to_string(resp.status));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(resp.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable, std::string("search API sent bad JSON: ") + e.what());
  }
  const char* list_key = doc.contains("results") ? "results" : "organic_results";
  std::vector<RawResult> out;
  if (!doc.contains(list_key)) return out;
  for (const auto& e : doc[list_key]) {
    RawResult r;
    r.url = e.contains("url") ? e["url"].get<std::string>() : e.value("link", "");
    r.title = e.value("title", "");
    if (e.contains("snippet") && e["snippet"].is_string()) r.snippet = e["snippet"].get<std::string>();
    r.sponsored = e.value("sponsored", false);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawResult> parse_duckduckgo_html(std::string_view page) {
  std::vector<RawResult> out;
  static constexpr std::string_view anchor_class = "result__a";
  static constexpr std::string_view snippet_class = "result__snippet";
  size_t pos = 0;
  for (;;) {
    auto hit = page.find(anchor_class, pos);
    if (hit == std::string_view::npos) break;
    auto tag_start = page.rfind('<', hit);
    auto tag_end = page.find('>', hit);
    auto close = page.find("</a>", tag_end);
    if (tag_start == std::string_view::npos || tag_end == std::string_view::npos ||
        close == std::string_view::npos)
      break;
    auto next = page.find(anchor_class, close);
    auto block_end = next == std::string_view::npos ? page.size() : next;

    RawResult r;
    auto href = html::attribute(page.substr(tag_start, tag_end - tag_start + 1), "href");
    if (auto uddg = href.find("uddg="); uddg != std::string::npos) {
      auto end = href.find('&', uddg);
      href = url_decode(href.substr(uddg + 5, end == std::string::npos ? std::string::npos : end - uddg - 5));
    } else if (href.rfind("//", 0) == 0) {
      href = "https:" + href;
    }
    r.url = href;
    r.title = html::inner_text(page.substr(tag_end + 1, close - tag_end - 1));

    // Ads carry result--ad on the enclosing block.
    auto block_start = page.rfind("class=\"result", tag_start);
    if (block_start != std::string_view::npos) {
      auto attr_end = page.find('"', block_start + 7);
      auto cls = page.substr(block_start, attr_end - block_start);
      r.sponsored = cls.find("result--ad") != std::string_view::npos;
    }
    auto snip = page.substr(close, block_end - close).find(snippet_class);
    if (snip != std::string_view::npos) {
      auto s_tag_end = page.find('>', close + snip);
      // Snippets contain <b> markup; take everything up to the closing anchor or div.
      auto s_close = std::min({page.find("</a>", s_tag_end), page.find("</div>", s_tag_end), block_end});
      if (s_tag_end != std::string_view::npos && s_close != std::string_view::npos && s_close > s_tag_end)
        r.snippet = html::inner_text(page.substr(s_tag_end + 1, s_close - s_tag_end - 1));
    }
    out.push_back(std::move(r));
    pos = close;
  }
  return out;
}

std::vector<RawResult> DuckDuckGoHtmlProvider::fetch(const SearchRequest& req) {
  auto resp = http::get(endpoint_ + "?q=" + url_encode(req.question));
  if (resp.status == 429 || resp.status == 202)
    throw RateLimitedError("duckduckgo throttled the request",
                           resp.retry_after.value_or(std::chrono::milliseconds(0)));
  if (resp.status != 200)
    throw Error(ErrorCode::ProviderUnavailable, "duckduckgo returned HTTP " + std::to_string(resp.status));
  return parse_duckduckgo_html(resp.body);
}

SerpClient::SerpClient(Engine engine, std::shared_ptr<SerpProvider> provider, RateLimitPolicy policy)
    : engine_(engine), provider_(std::move(provider)), policy_(policy) {
  if (!provider_) throw Error(ErrorCode::InvalidArgument, "SerpClient needs a provider");
}

Serp SerpClient::search(int topic_id, const std::string& question, int depth) {
  if (depth < 1 || depth > 20)
    throw Error(ErrorCode::InvalidArgument, "depth must be within [1, 20]");

  std::lock_guard lock(mu_);
  SearchRequest req{topic_id, question, depth};
  std::vector<RawResult> raw;
  for (int attempt = 0;; ++attempt) {
    if (last_request_) {
      auto ready = *last_request_ + policy_.min_interval;
      auto now = std::chrono::steady_clock::now();
      if (now < ready) std::this_thread::sleep_until(ready);
    }
    last_request_ = std::chrono::steady_clock::now();
    ++calls_;
    try {
      raw = provider_->fetch(req);
      break;
    } catch (const RateLimitedError& e) {
      if (attempt >= policy_.max_retries) throw;
      std::chrono::milliseconds backoff = policy_.backoff_base * (1LL << attempt);
      std::this_thread::sleep_for(std::max(backoff, e.advised_delay()));
    }
  }

  Serp serp;
  serp.engine = engine_;
  serp.topic_id = topic_id;
  serp.entries = organic_entries(raw, depth);
  serp.retrieved_at = text::now_iso8601();
  if (serp.entries.empty())
    throw Error(ErrorCode::EmptySerp, std::string(to_string(engine_)) + " returned no organic results for topic " +
                                          std::to_string(topic_id));
  return serp;
}

std::string serp_cache_key(Engine engine, const std::string& question, int depth) {
  return text::sha256_hex(std::string(to_string(engine)) + "\n" + text::collapse_whitespace(question) +
                          "\n" + std::to_string(depth));
}

Serp cached_search(SerpClient& client, int topic_id, const std::string& question, int depth,
                   RunStore& store, const CacheOptions& opts) {
  auto key = serp_cache_key(client.engine(), question, depth);
  if (auto hit = store.find(RecordKind::Serp, key)) return serp_from_json(hit->payload);
  if (opts.offline && client.is_live())
    throw Error(ErrorCode::OfflineCacheMiss,
                "offline: no stored SERP for " + std::string(to_string(client.engine())) + " topic " +
                    std::to_string(topic_id));
  auto serp = client.search(topic_id, question, depth);
  auto rec = store.append(RecordKind::Serp, key, to_json(serp), opts.run_id);
  return serp_from_json(rec.payload);
}

}  // namespace medseek

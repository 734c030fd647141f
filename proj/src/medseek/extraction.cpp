#include "medseek/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "medseek/error.hpp"
#include "medseek/html.hpp"
#include "medseek/parallel.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

constexpr std::array<std::string_view, 11> kDroppedElements{
    "script", "style", "nav", "header", "footer", "aside", "noscript", "template", "head", "svg", "iframe"};

constexpr std::array<std::string_view, 36> kBlockElements{
    "p",     "div",  "br",      "li",      "ul",         "ol",     "h1",     "h2",     "h3",
    "h4",    "h5",   "h6",      "tr",      "table",      "section", "article", "main",  "blockquote",
    "pre",   "hr",   "dd",      "dt",      "dl",         "figure", "figcaption", "title", "body",
    "html",  "form", "fieldset", "address", "caption",   "details", "summary", "thead", "tbody"};

template <size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

bool tag_start_char(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '/' || c == '!' || c == '?';
}

std::string tag_name(std::string_view tag_body) {
  size_t i = 0;
  if (i < tag_body.size() && tag_body[i] == '/') ++i;
  size_t start = i;
  while (i < tag_body.size() && (std::isalnum(static_cast<unsigned char>(tag_body[i])) || tag_body[i] == '-'))
    ++i;
  return text::to_lower(tag_body.substr(start, i - start));
}

// Position just past the end tag matching `name` (nesting-aware), or npos.
size_t skip_element(std::string_view html, size_t from, const std::string& name) {
  const bool raw_text = name == "script" || name == "style";
  int depth = 1;
  size_t pos = from;
  while (pos < html.size()) {
    auto lt = html.find('<', pos);
    if (lt == std::string_view::npos) return std::string_view::npos;
    auto gt = html.find('>', lt);
    if (gt == std::string_view::npos) return std::string_view::npos;
    auto body = html.substr(lt + 1, gt - lt - 1);
    bool closing = !body.empty() && body[0] == '/';
    if (tag_name(body) == name) {
      if (closing) {
        if (--depth == 0) return gt + 1;
      } else if (!raw_text && (body.empty() || body.back() != '/')) {
        ++depth;
      }
    }
    pos = gt + 1;
  }
  return std::string_view::npos;
}

// Makes decoded '<' and '&' inert so a second pass leaves the text unchanged.
std::string neutralize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    out.push_back(s[i]);
    if (s[i] == '<' && i + 1 < s.size() && tag_start_char(s[i + 1])) {
      out.push_back(' ');
    } else if (s[i] == '&' && i + 1 < s.size() && !std::isspace(static_cast<unsigned char>(s[i + 1]))) {
      auto semi = s.find(';', i + 1);
      if (semi != std::string_view::npos && html::decode_entities(s.substr(i, semi - i + 1)) != s.substr(i, semi - i + 1))
        out.push_back(' ');
    }
  }
  return out;
}

std::string normalize_lines(std::string_view s) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= s.size()) {
    auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) nl = s.size();
    auto line = text::collapse_whitespace(s.substr(start, nl - start));
    if (!line.empty()) lines.push_back(std::move(line));
    start = nl + 1;
  }
  return text::join(lines, "\n");
}

PageRecord fetch_record(const std::string& url, PageSource& source) {
  PageRecord rec;
  rec.page.url = url;
  rec.page.fetched_at = text::now_iso8601();
  RawPage raw;
  try {
    raw = source.get(url);
  } catch (const Error&) {
    rec.page.status = PageStatus::FetchFailed;
    return rec;
  }
  // Non-HTML payloads (PDF, images, ...) are treated as failed fetches.
  auto ct = text::to_lower(raw.content_type);
  bool html_like = ct.empty() || ct.find("html") != std::string::npos || ct.find("text/plain") != std::string::npos;
  if (raw.status < 200 || raw.status >= 300 || !html_like) {
    rec.page.status = PageStatus::FetchFailed;
    return rec;
  }
  rec.raw = std::move(raw.body);
  rec.page.text = html_to_text(rec.raw);
  rec.page.status = rec.page.text.empty() ? PageStatus::EmptyAfterStrip : PageStatus::Ok;
  return rec;
}

}  // namespace

std::string_view to_string(PageStatus s) {
  switch (s) {
    case PageStatus::Ok: return "ok";
    case PageStatus::FetchFailed: return "fetch_failed";
    case PageStatus::EmptyAfterStrip: return "empty_after_strip";
  }
  return "?";
}

PageStatus page_status_from_string(std::string_view s) {
  if (s == "ok") return PageStatus::Ok;
  if (s == "fetch_failed") return PageStatus::FetchFailed;
  if (s == "empty_after_strip") return PageStatus::EmptyAfterStrip;
  throw Error(ErrorCode::ParseError, "unknown page status '" + std::string(s) + "'");
}

std::string html_to_text(std::string_view input) {
  std::string clean;
  for (char32_t cp : text::decode_utf8(input)) text::append_utf8(clean, cp);
  std::string_view html = clean;

  std::string out;
  std::string pending;  // text run awaiting entity decoding
  auto flush = [&] {
    out += neutralize(html::decode_entities(pending));
    pending.clear();
  };

  size_t pos = 0;
  while (pos < html.size()) {
    char c = html[pos];
    if (c != '<' || pos + 1 >= html.size() || !tag_start_char(html[pos + 1])) {
      pending.push_back(c == '\r' || c == '\t' ? ' ' : c);
      ++pos;
      continue;
    }
    flush();
    if (html.substr(pos, 4) == "<!--") {
      auto end = html.find("-->", pos + 4);
      pos = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    auto gt = html.find('>', pos);
    if (gt == std::string_view::npos) break;
    auto body = html.substr(pos + 1, gt - pos - 1);
    auto name = tag_name(body);
    bool closing = !body.empty() && body[0] == '/';
    bool self_closing = !body.empty() && body.back() == '/';
    pos = gt + 1;
    if (!closing && !self_closing && contains(kDroppedElements, name)) {
      auto end = skip_element(html, pos, name);
      pos = end == std::string_view::npos ? html.size() : end;
      continue;
    }
    if (contains(kBlockElements, name)) {
      out.push_back('\n');
    } else if (name == "td" || name == "th") {
      out.push_back(' ');
    }
  }
  flush();
  // Raw newlines are kept as line breaks so plain text passes through unchanged.
  return normalize_lines(out);
}

std::vector<Passage> split_passages(const PageText& page, int window_words, int stride_words) {
  if (stride_words < 1 || window_words < stride_words)
    throw Error(ErrorCode::InvalidArgument, "need window_words >= stride_words >= 1");
  if (page.status != PageStatus::Ok)
    throw Error(ErrorCode::EmptyPage, "page " + page.url + " is " + std::string(to_string(page.status)));
  auto words = text::split_words(page.text);
  if (words.empty()) throw Error(ErrorCode::EmptyPage, "page " + page.url + " has no words");

  const size_t n = words.size();
  const auto window = static_cast<size_t>(window_words);
  const auto stride = static_cast<size_t>(stride_words);
  std::vector<Passage> out;
  size_t covered = 0;
  for (size_t start = 0; start < n && covered < n; start += stride) {
    auto end = std::min(start + window, n);
    if (end <= covered) continue;
    Passage p;
    p.source_url = page.url;
    p.index = static_cast<int>(out.size());
    p.word_span = {start, end};
    std::vector<std::string> slice(words.begin() + static_cast<std::ptrdiff_t>(start),
                                   words.begin() + static_cast<std::ptrdiff_t>(end));
    p.text = text::join(slice, " ");
    out.push_back(std::move(p));
    covered = end;
  }
  return out;
}

RawPage LivePageSource::get(const std::string& url) {
  auto resp = http::get(url, opts_);
  return RawPage{resp.status, resp.content_type, std::move(resp.body)};
}

FixturePageSource::FixturePageSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  auto index_path = dir_ / "index.json";
  if (!std::filesystem::exists(index_path))
    throw Error(ErrorCode::ProviderUnavailable, "page fixture index missing: " + index_path.string());
  try {
    index_ = nlohmann::json::parse(text::read_file(index_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, index_path.string() + ": " + e.what());
  }
}

RawPage FixturePageSource::get(const std::string& url) {
  auto it = index_.find(url);
  if (it == index_.end()) it = index_.find(canonicalize_url(url));
  if (it == index_.end()) return RawPage{404, "text/html", ""};
  RawPage page;
  page.status = it->value("status", 200L);
  page.content_type = it->value("content_type", "text/html; charset=utf-8");
  if (it->contains("file")) page.body = text::read_file(dir_ / (*it)["file"].get<std::string>());
  return page;
}

PageText fetch_page(const std::string& url, PageSource& source) {
  if (!http::is_http_url(url)) throw Error(ErrorCode::InvalidUrl, "not an http(s) URL: " + url);
  return fetch_record(url, source).page;
}

nlohmann::json to_json(const PageRecord& rec) {
  return {{"url", rec.page.url},
          {"text", rec.page.text},
          {"fetched_at", rec.page.fetched_at},
          {"status", to_string(rec.page.status)},
          {"raw", rec.raw}};
}

PageRecord page_record_from_json(const nlohmann::json& j) {
  try {
    PageRecord rec;
    rec.page.url = j.at("url").get<std::string>();
    rec.page.text = j.at("text").get<std::string>();
    rec.page.fetched_at = j.value("fetched_at", "");
    rec.page.status = page_status_from_string(j.at("status").get<std::string>());
    rec.raw = j.value("raw", "");
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("bad page record: ") + e.what());
  }
}

std::string page_cache_key(const std::string& url) {
  return text::sha256_hex(canonicalize_url(url));
}

PageFetcher::PageFetcher(std::shared_ptr<PageSource> source, RunStore& store, CacheOptions opts)
    : source_(std::move(source)), store_(store), opts_(std::move(opts)) {}

std::shared_ptr<std::mutex> PageFetcher::lock_for_host(const std::string& url) {
  auto canon = canonicalize_url(url);
  auto scheme_end = canon.find("://");
  auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto host = canon.substr(host_start, canon.find_first_of("/?", host_start) - host_start);
  std::lock_guard lock(host_mu_);
  auto& slot = host_locks_[host];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

PageText PageFetcher::fetch(const std::string& url) {
  auto key = page_cache_key(url);
  if (auto hit = store_.find(RecordKind::Page, key)) return page_record_from_json(hit->payload).page;
  if (!http::is_http_url(url)) throw Error(ErrorCode::InvalidUrl, "not an http(s) URL: " + url);
  if (opts_.offline && source_->is_live())
    throw Error(ErrorCode::OfflineCacheMiss, "offline: page not cached: " + url);

  PageRecord rec;
  {
    std::lock_guard lock(*lock_for_host(url));
    ++calls_;
    rec = fetch_record(url, *source_);
  }
  auto stored = store_.append(RecordKind::Page, key, to_json(rec), opts_.run_id);
  return page_record_from_json(stored.payload).page;
}

std::vector<PageText> PageFetcher::fetch_all(const std::vector<std::string>& urls, size_t max_in_flight) {
  std::vector<PageText> out(urls.size());
  parallel_for(urls.size(), max_in_flight, [&](size_t i) { out[i] = fetch(urls[i]); });
  return out;
}

}  // namespace medseek

#include <doctest.h>

#include "medseek/error.hpp"
#include "medseek/extraction.hpp"
#include "medseek/text.hpp"
#include "test_support.hpp"

using namespace medseek;

namespace {

PageText page_of_words(size_t n) {
  std::vector<std::string> words;
  for (size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  return PageText{"https://p.org", text::join(words, " "), "", PageStatus::Ok};
}

class MapSource final : public PageSource {
 public:
  std::map<std::string, RawPage> pages;
  int calls = 0;
  bool live = false;
  RawPage get(const std::string& url) override {
    ++calls;
    auto it = pages.find(url);
    return it == pages.end() ? RawPage{404, "text/html", ""} : it->second;
  }
  bool is_live() const override { return live; }
};

}  // namespace

TEST_CASE("entities decode without leaving markup") {
  CHECK(html_to_text("<p>A&amp;B</p>") == "A&B");
  CHECK(html_to_text("x &lt;b&gt; y") == "x < b> y");
  CHECK(html_to_text("caf&eacute; &#233; &#x41;") == "café é A");
}

TEST_CASE("boilerplate elements are dropped") {
  auto text = html_to_text(
      "<html><head><title>T</title><style>p{}</style></head><body><nav>menu</nav><header>H</header>"
      "<script>var x = '<p>';</script><p>Body text.</p><aside>side</aside><footer>F</footer><!-- c --></body></html>");
  CHECK(text == "Body text.");
}

TEST_CASE("block elements become line breaks") {
  CHECK(html_to_text("<div>a</div><div>b</div>") == "a\nb");
  CHECK(html_to_text("a<br>b") == "a\nb");
  CHECK(html_to_text("<p>a\n\n\n\nb</p>") == "a\nb");
  CHECK(html_to_text("<span>a</span> <span>b</span>") == "a b");
}

TEST_CASE("html_to_text is idempotent and never leaves tags") {
  const char* samples[] = {"<p>A&amp;B</p>",       "x &lt;p&gt;y&lt;/p&gt; z", "&amp;lt;",
                           "<div>a<b>b</b>c</div>", "plain\ntext\n\n\nhere",    "<unclosed",
                           "1 < 2 & 3 > 2",         "&lt;script&gt;x&lt;/script&gt;"};
  for (const char* s : samples) {
    auto once = html_to_text(s);
    CAPTURE(s);
    CHECK(html_to_text(once) == once);
    CHECK(once.find("\n\n\n") == std::string::npos);
  }
}

TEST_CASE("windows of 120 words every 60") {
  auto one = split_passages(page_of_words(100));
  REQUIRE(one.size() == 1);
  CHECK(one[0].word_span == std::pair<size_t, size_t>{0, 100});

  auto two = split_passages(page_of_words(180));
  REQUIRE(two.size() == 2);
  CHECK(two[0].word_span == std::pair<size_t, size_t>{0, 120});
  CHECK(two[1].word_span == std::pair<size_t, size_t>{60, 180});
  CHECK(two[1].index == 1);
  CHECK(text::split_words(two[1].text).front() == "w60");

  auto three = split_passages(page_of_words(181));
  CHECK(three.size() == 3);
  CHECK(three.back().word_span == std::pair<size_t, size_t>{120, 181});
}

TEST_CASE("every word lands in some passage") {
  for (size_t n : {1u, 59u, 60u, 61u, 119u, 120u, 121u, 300u, 301u}) {
    auto passages = split_passages(page_of_words(n), 120, 60);
    std::vector<bool> seen(n, false);
    for (const auto& p : passages)
      for (size_t i = p.word_span.first; i < p.word_span.second; ++i) seen[i] = true;
    CAPTURE(n);
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("pages without text are EmptyPage") {
  PageText failed{"https://x.org", "", "", PageStatus::FetchFailed};
  CHECK(error_code_of([&] { split_passages(failed); }) == ErrorCode::EmptyPage);
  PageText stripped{"https://x.org", "", "", PageStatus::EmptyAfterStrip};
  CHECK(error_code_of([&] { split_passages(stripped); }) == ErrorCode::EmptyPage);
  CHECK(error_code_of([&] { split_passages(page_of_words(5), 10, 20); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fetch_page maps HTTP failures and empty pages to statuses") {
  MapSource src;
  src.pages["https://ok.org"] = {200, "text/html", "<p>hello world</p>"};
  src.pages["https://script.org"] = {200, "text/html", "<script>only()</script>"};
  src.pages["https://pdf.org"] = {200, "application/pdf", "%PDF"};
  CHECK(fetch_page("https://ok.org", src).status == PageStatus::Ok);
  CHECK(fetch_page("https://ok.org", src).text == "hello world");
  CHECK(fetch_page("https://script.org", src).status == PageStatus::EmptyAfterStrip);
  CHECK(fetch_page("https://missing.org", src).status == PageStatus::FetchFailed);
  CHECK(fetch_page("https://pdf.org", src).status != PageStatus::Ok);
  CHECK(error_code_of([&] { fetch_page("mailto:x@y", src); }) == ErrorCode::InvalidUrl);
}

TEST_CASE("PageFetcher caches by canonical URL") {
  TempDir dir;
  RunStore store(dir.path());
  auto src = std::make_shared<MapSource>();
  src->pages["https://ok.org/a"] = {200, "text/html", "<p>hi</p>"};
  PageFetcher fetcher(src, store);
  CHECK(fetcher.fetch("https://ok.org/a").text == "hi");
  CHECK(fetcher.fetch("HTTPS://OK.org/a/").text == "hi");
  CHECK(src->calls == 1);
  CHECK(fetcher.source_calls() == 1);
}

TEST_CASE("PageFetcher offline with a live source refuses misses") {
  TempDir dir;
  RunStore store(dir.path());
  auto src = std::make_shared<MapSource>();
  src->live = true;
  CacheOptions opts;
  opts.offline = true;
  PageFetcher fetcher(src, store, opts);
  CHECK(error_code_of([&] { fetcher.fetch("https://x.org"); }) == ErrorCode::OfflineCacheMiss);
  CHECK(src->calls == 0);
}

TEST_CASE("live source against a local server") {
  TestServer srv;
  srv.server.Get("/page", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html><body><nav>n</nav><p>Real content here.</p></body></html>", "text/html");
  });
  srv.server.Get("/gone", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
  srv.start();
  LivePageSource live;
  CHECK(fetch_page(srv.url("/page"), live).text == "Real content here.");
  CHECK(fetch_page(srv.url("/gone"), live).status == PageStatus::FetchFailed);
}

TEST_CASE("fixture pages load through the index") {
  FixturePageSource src(std::filesystem::path(MEDSEEK_FIXTURES) / "replay" / "pages");
  CHECK(src.get("https://nowhere.invalid/x").status == 404);
}

#include <doctest.h>

#include "medseek/error.hpp"
#include "medseek/llm_gateway.hpp"
#include "medseek/text.hpp"
#include "test_support.hpp"

using namespace medseek;

namespace {

class EchoProvider final : public LlmProvider {
 public:
  explicit EchoProvider(bool live) : live_(live) {}
  std::string complete(const ModelSpec& m, const std::string& prompt) override {
    ++calls;
    return m.model_id + ":" + std::to_string(prompt.size());
  }
  bool is_live() const override { return live_; }
  int calls = 0;

 private:
  bool live_;
};

ModelSpec spec(const std::string& provider, const std::string& id = "m1") {
  ModelSpec m;
  m.provider = provider;
  m.model_id = id;
  return m;
}

}  // namespace

TEST_CASE("model spec validation and JSON round-trip") {
  ModelSpec m = spec("p");
  m.knowledge_cutoff = "2021-09-01";
  m.max_output_tokens = 0;
  CHECK(model_spec_from_json(to_json(m)) == m);
  ModelSpec bad = spec("p", "");
  CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
  bad = spec("p");
  bad.temperature = -1;
  CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stub responder: hash first, then rules, then default") {
  const std::string prompt = "Is water wet?";
  StubResponder stub(nlohmann::json{{text::sha256_hex(prompt), "hashed"},
                                    {"rules",
                                     {{{"contains", "water"}, {"text", "only m2"}, {"model", "m2"}},
                                      {{"contains", "water"}, {"text", "rule"}}}},
                                    {"default", "fallback"}});
  CHECK(stub.complete(spec("s"), prompt) == "hashed");
  CHECK(stub.complete(spec("s", "m2"), "more water") == "only m2");
  CHECK(stub.complete(spec("s"), "more water") == "rule");
  CHECK(stub.complete(spec("s"), "unrelated") == "fallback");
  StubResponder strict(nlohmann::json::object());
  CHECK(error_code_of([&] { strict.complete(spec("s"), "x"); }) == ErrorCode::ProviderError);
}

TEST_CASE("gateway caches completions and marks hits") {
  TempDir dir;
  RunStore store(dir.path());
  LlmGateway gw(store);
  auto echo = std::make_shared<EchoProvider>(false);
  gw.register_provider("echo", echo);
  auto a = gw.complete(spec("echo"), "hello");
  auto b = gw.complete(spec("echo"), "hello");
  CHECK_FALSE(a.cached);
  CHECK(b.cached);
  CHECK(a.raw_text == b.raw_text);
  CHECK(echo->calls == 1);
  CHECK(gw.provider_calls() == 1);

  // A different temperature is a different key.
  auto warm = spec("echo");
  warm.temperature = 0.7;
  CHECK_FALSE(gw.complete(warm, "hello").cached);
  CHECK(echo->calls == 2);
}

TEST_CASE("live call budget counts only live misses") {
  TempDir dir;
  RunStore store(dir.path());
  GatewayOptions opts;
  opts.live_call_budget = 2;
  LlmGateway gw(store, opts);
  auto live = std::make_shared<EchoProvider>(true);
  gw.register_provider("live", live);
  gw.register_provider("local", std::make_shared<EchoProvider>(false));
  gw.complete(spec("live"), "a");
  gw.complete(spec("live"), "b");
  gw.complete(spec("live"), "a");  // cached, free
  gw.complete(spec("local"), "c");
  CHECK(error_code_of([&] { gw.complete(spec("live"), "d"); }) == ErrorCode::BudgetExceeded);
  CHECK(live->calls == 2);
  CHECK(gw.live_calls() == 2);
}

TEST_CASE("offline gateway refuses live misses but serves hits") {
  TempDir dir;
  RunStore store(dir.path());
  auto live = std::make_shared<EchoProvider>(true);
  {
    LlmGateway online(store);
    online.register_provider("live", live);
    online.complete(spec("live"), "cached prompt");
  }
  GatewayOptions opts;
  opts.offline = true;
  LlmGateway gw(store, opts);
  gw.register_provider("live", live);
  CHECK(gw.complete(spec("live"), "cached prompt").cached);
  CHECK(error_code_of([&] { gw.complete(spec("live"), "new prompt"); }) == ErrorCode::OfflineCacheMiss);
  CHECK(live->calls == 1);
}

TEST_CASE("unknown provider is a ProviderError") {
  TempDir dir;
  RunStore store(dir.path());
  LlmGateway gw(store);
  CHECK(error_code_of([&] { gw.complete(spec("ghost"), "x"); }) == ErrorCode::ProviderError);
}

TEST_CASE("HTTP provider posts the completion contract") {
  TestServer srv;
  nlohmann::json seen;
  std::string auth;
  srv.server.Post("/complete", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"text": "Yes."})", "application/json");
  });
  srv.server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  srv.start();
  HttpLlmProvider http(srv.url("/complete"), "secret");
  auto m = spec("h", "gpt-x");
  m.max_output_tokens = 8;
  CHECK(http.complete(m, "Q?") == "Yes.");
  CHECK(seen["model_id"] == "gpt-x");
  CHECK(seen["prompt"] == "Q?");
  CHECK(seen["max_tokens"] == 8);
  CHECK(auth == "Bearer secret");
  HttpLlmProvider failing(srv.url("/fail"), "");
  try {
    failing.complete(m, "Q?");
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK(e.status() == 500);
  }
}

TEST_CASE("zero-shot prompts") {
  CHECK(build_qa_prompt("Can honey soothe a cough?", PromptKind::NoContext) ==
        "Can honey soothe a cough?\nAnswer only 'yes' or 'no'.");
  CHECK(build_qa_prompt("Q?", PromptKind::NonExpert) == std::string(kNonExpertContext) + "\nQ?\n" + std::string(kYesNoSuffix));
  CHECK(build_qa_prompt("Q?", PromptKind::Expert).rfind(std::string(kExpertContext), 0) == 0);
}

TEST_CASE("few-shot prompts put demonstrations before the question") {
  auto p = build_fewshot_prompt("Q?", PromptKind::NoContext, {{"D1?", "Yes"}, {"D2?", "No"}});
  CHECK(p == "Question: D1?\nAnswer: Yes\nQuestion: D2?\nAnswer: No\nQuestion: Q?\nAnswer:");
  CHECK(error_code_of([] { build_fewshot_prompt("Q?", PromptKind::Expert, {}); }) == ErrorCode::EmptyDemos);
  std::vector<DemoPair> four(4, DemoPair{"d?", "Yes"});
  CHECK(error_code_of([&] { build_fewshot_prompt("Q?", PromptKind::Expert, four); }) == ErrorCode::InvalidArgument);
  CHECK(default_demo_pairs().size() == 3);
}

TEST_CASE("binary answers are read from the first ten tokens") {
  CHECK(parse_binary_answer("Yes.") == BinaryStance::Yes);
  CHECK(parse_binary_answer("  NO, it does not") == BinaryStance::No);
  CHECK(parse_binary_answer("Well, the short answer is yes") == BinaryStance::Yes);
  CHECK_FALSE(parse_binary_answer("It depends on the age of the child."));
  CHECK_FALSE(parse_binary_answer("one two three four five six seven eight nine ten yes"));
  CHECK_FALSE(parse_binary_answer("yesterday nothing"));
  CHECK_FALSE(parse_binary_answer(""));
}

TEST_CASE("prompt kinds round-trip through strings") {
  for (auto k : all_prompt_kinds()) CHECK(prompt_kind_from_string(to_string(k)) == k);
  CHECK(error_code_of([] { prompt_kind_from_string("novice"); }) == ErrorCode::InvalidArgument);
}

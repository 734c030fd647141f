#include <doctest.h>

#include <fstream>
#include <thread>

#include "medseek/error.hpp"
#include "medseek/run_store.hpp"
#include "medseek/text.hpp"
#include "test_support.hpp"

using namespace medseek;

TEST_CASE("append then find returns the same payload") {
  TempDir dir;
  RunStore store(dir.path());
  auto rec = store.append(RecordKind::Serp, "k1", {{"a", 1}}, "run");
  CHECK(rec.checksum == text::sha256_hex(RunStore::canonical_dump({{"a", 1}})));
  auto hit = store.find(RecordKind::Serp, "k1");
  REQUIRE(hit);
  CHECK(hit->payload == nlohmann::json{{"a", 1}});
  CHECK_FALSE(store.find(RecordKind::Page, "k1"));
}

TEST_CASE("appending an existing key keeps the first record") {
  TempDir dir;
  RunStore store(dir.path());
  store.append(RecordKind::Answer, "k", {{"v", 1}}, "r");
  auto again = store.append(RecordKind::Answer, "k", {{"v", 2}}, "r");
  CHECK(again.payload["v"] == 1);
  CHECK(store.records(RecordKind::Answer).size() == 1);
}

TEST_CASE("records persist across store instances") {
  TempDir dir;
  {
    RunStore store(dir.path());
    store.append(RecordKind::Completion, "x", {{"t", "hello"}}, "r");
  }
  RunStore reopened(dir.path());
  auto hit = reopened.find(RecordKind::Completion, "x");
  REQUIRE(hit);
  CHECK(hit->payload["t"] == "hello");
}

TEST_CASE("tampered payload is StoreCorrupt") {
  TempDir dir;
  {
    RunStore store(dir.path());
    store.append(RecordKind::Serp, "k", {{"rank", 1}}, "r");
  }
  auto file = dir.path() / "serp.jsonl";
  auto body = text::read_file(file);
  auto pos = body.find("\"rank\":1");
  REQUIRE(pos != std::string::npos);
  body.replace(pos, 8, "\"rank\":2");
  text::write_file(file, body);
  RunStore store(dir.path());
  try {
    store.find(RecordKind::Serp, "k");
    FAIL("expected StoreCorrupt");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StoreCorrupt);
  }
}

TEST_CASE("concurrent appends from separate store instances all land") {
  TempDir dir;
  constexpr int kThreads = 4;
  constexpr int kPerThread = 50;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      RunStore store(dir.path());
      for (int i = 0; i < kPerThread; ++i)
        store.append(RecordKind::Page, std::to_string(t) + "-" + std::to_string(i), {{"i", i}}, "r");
    });
  }
  for (auto& th : threads) th.join();
  RunStore store(dir.path());
  CHECK(store.records(RecordKind::Page).size() == kThreads * kPerThread);
}

TEST_CASE("a partially written trailing line is ignored") {
  TempDir dir;
  {
    RunStore store(dir.path());
    store.append(RecordKind::Serp, "a", {{"x", 1}}, "r");
  }
  {
    std::ofstream f(dir.path() / "serp.jsonl", std::ios::app);
    f << "{\"run_id\":\"r\",\"kind\":\"serp\"";
  }
  RunStore store(dir.path());
  CHECK(store.records(RecordKind::Serp).size() == 1);
}

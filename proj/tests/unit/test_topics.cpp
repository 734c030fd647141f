#include <doctest.h>

#include <random>

#include "medseek/error.hpp"
#include "medseek/topics.hpp"
#include "test_support.hpp"

using namespace medseek;

namespace {

auto code_of(const std::function<void()>& f) { return error_code_of(f); }

constexpr const char* kMasks = R"(<topics>
  <topic>
    <number>1</number>
    <query>masks covid</query>
    <description>Does wearing masks prevent COVID-19?</description>
    <narrative>Masks reduce transmission.</narrative>
    <stance>helpful</stance>
  </topic>
</topics>)";

}  // namespace

TEST_CASE("parse_topics reads the canonical format") {
  auto topics = parse_topics(kMasks, 2020);
  REQUIRE(topics.size() == 1);
  CHECK(topics[0].id == 1);
  CHECK(topics[0].question == "Does wearing masks prevent COVID-19?");
  CHECK(topics[0].stance == BinaryStance::Yes);
  CHECK(topics[0].query == "masks covid");
  CHECK(topics[0].year == 2020);
}

TEST_CASE("stance vocabulary is closed") {
  CHECK(stance_to_label("helpful") == BinaryStance::Yes);
  CHECK(stance_to_label(" Unhelpful ") == BinaryStance::No);
  CHECK(code_of([] { stance_to_label("maybe"); }) == ErrorCode::UnknownStance);
}

TEST_CASE("malformed topic files are rejected") {
  CHECK(code_of([] { parse_topics("", 2022); }) == ErrorCode::MalformedTopicFile);
  CHECK(code_of([] { parse_topics("<topics></topics>", 2022); }) == ErrorCode::MalformedTopicFile);
  CHECK(code_of([] {
          parse_topics("<topics><topic><number>101</number><description>A?</description><stance>helpful</stance></topic>"
                       "<topic><number>101</number><description>B?</description><stance>unhelpful</stance></topic></topics>",
                       2022);
        }) == ErrorCode::DuplicateTopicId);
  CHECK(code_of([] { parse_topics("<topics><topic><number>1</number><stance>helpful</stance></topic></topics>", 2022); }) ==
        ErrorCode::MissingField);
  CHECK(code_of([] {
          parse_topics("<topics><topic><number>1</number><description>Not a question</description>"
                       "<stance>helpful</stance></topic></topics>",
                       2022);
        }) == ErrorCode::InvalidTopic);
}

TEST_CASE("entities, CDATA and comments are handled") {
  auto topics = parse_topics(R"(<?xml version="1.0"?>
<!-- header -->
<topics><topic><number>7</number>
<description><![CDATA[Is A & B   safe?]]></description>
<query>a &amp; b</query><stance>unhelpful</stance></topic></topics>)",
                             2021);
  REQUIRE(topics.size() == 1);
  CHECK(topics[0].question == "Is A & B safe?");
  CHECK(topics[0].query == "a & b");
}

TEST_CASE("per-year aliases map foreign tag names and stance strings") {
  TopicSchema schema;
  schema.tag_aliases = {{"answer", "stance"}, {"title", "query"}};
  schema.stance_aliases = {{"yes", "helpful"}, {"no", "unhelpful"}};
  auto topics = parse_topics(
      "<topics><topic><number>3</number><title>t</title><description>Q?</description><answer>yes</answer>"
      "<evidence>http://x</evidence></topic></topics>",
      2021, schema);
  REQUIRE(topics.size() == 1);
  CHECK(topics[0].stance == BinaryStance::Yes);
  CHECK(topics[0].query == "t");
  REQUIRE(topics[0].extras.size() == 1);
  CHECK(topics[0].extras[0].first == "evidence");
}

TEST_CASE("JSON mirror format parses like the markup format") {
  auto topics = parse_topics_json(
      R"([{"number": 5, "query": "q", "description": "Is it?", "stance": "unhelpful", "narrative": "n"}])", 2022);
  REQUIRE(topics.size() == 1);
  CHECK(topics[0].id == 5);
  CHECK(topics[0].stance == BinaryStance::No);
}

TEST_CASE("serialize then parse is the identity on random topic sets") {
  std::mt19937 rng(42);
  const std::string alphabet = "abc xyz<>&'\"éü 01";
  auto word = [&](size_t n) {
    std::string s;
    std::uniform_int_distribution<size_t> d(0, alphabet.size() - 1);
    for (size_t i = 0; i < n; ++i) s += alphabet[d(rng)];
    return s;
  };
  for (int round = 0; round < 50; ++round) {
    std::vector<Topic> topics;
    int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      Topic t;
      t.id = 100 + i;
      t.year = 2022;
      t.query = "q" + std::to_string(i);
      t.question = "Does " + std::to_string(i) + " work?";
      t.narrative = "n" + std::to_string(rng() % 1000);
      t.stance = rng() % 2 ? BinaryStance::Yes : BinaryStance::No;
      if (rng() % 2) t.extras.emplace_back("disclaimer", "d" + std::to_string(i));
      topics.push_back(t);
    }
    // Free text in query/narrative must survive escaping; collapse so the
    // normalised form is what we compare against.
    topics[0].narrative = "x" + word(12) + "y";
    auto back = parse_topics(serialize_topics(topics), 2022);
    REQUIRE(back.size() == topics.size());
    for (size_t i = 0; i < topics.size(); ++i) {
      CHECK(back[i].id == topics[i].id);
      CHECK(back[i].question == topics[i].question);
      CHECK(back[i].stance == topics[i].stance);
      CHECK(back[i].query == topics[i].query);
      CHECK(back[i].extras == topics[i].extras);
    }
    CHECK(serialize_topics(back) == serialize_topics(parse_topics(serialize_topics(back), 2022)));
  }
}

TEST_CASE("bundled fixture topics load") {
  auto topics = load_topics(std::filesystem::path(MEDSEEK_FIXTURES) / "replay" / "topics.xml", 2022);
  CHECK(topics.size() == 5);
  CHECK(find_topic(topics, 104) != nullptr);
  CHECK(find_topic(topics, 999) == nullptr);
}

#include <doctest.h>

#include "medseek/answer_extraction.hpp"
#include "medseek/error.hpp"
#include "test_support.hpp"

using namespace medseek;

TEST_CASE("reading-comprehension prompt") {
  CHECK(build_rc_prompt("Honey soothes coughs", "Can honey help a cough?") ==
        "Honey soothes coughs. Based on the previous text, answer 'yes', 'no' or 'no answer provided' to the "
        "following question: Can honey help a cough?");
  CHECK(build_rc_prompt("Ends here.", "Q?") ==
        "Ends here. Based on the previous text, answer 'yes', 'no' or 'no answer provided' to the following "
        "question: Q?");
  CHECK(error_code_of([] { build_rc_prompt("  ", "Q?"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("reader output mapping") {
  CHECK(map_reader_output("Yes") == AnswerLabel::Yes);
  CHECK(map_reader_output("no.") == AnswerLabel::No);
  CHECK(map_reader_output("No answer provided.") == AnswerLabel::NoAnswer);
  CHECK(map_reader_output("There is no answer in the text.") == AnswerLabel::NoAnswer);
  CHECK(map_reader_output("No. There is no answer to doubt.") == AnswerLabel::No);
  CHECK(map_reader_output("The passage does not say") == AnswerLabel::NoAnswer);
  CHECK(map_reader_output("") == AnswerLabel::NoAnswer);
}

TEST_CASE("correctness needs an answer that matches the stance") {
  CHECK(is_correct(AnswerLabel::Yes, BinaryStance::Yes));
  CHECK(is_correct(AnswerLabel::No, BinaryStance::No));
  CHECK_FALSE(is_correct(AnswerLabel::Yes, BinaryStance::No));
  CHECK_FALSE(is_correct(AnswerLabel::NoAnswer, BinaryStance::No));
  CHECK_FALSE(is_correct(AnswerLabel::NoAnswer, BinaryStance::Yes));
}

TEST_CASE("answer records round-trip and reject correct no-answers") {
  AnswerRecord r{Engine::Bing, 101, 3, AnswerLabel::No, true, "https://x.org", 2, "run"};
  CHECK(answer_record_from_json(to_json(r)) == r);
  auto j = to_json(r);
  j["label"] = "no_answer";
  CHECK(error_code_of([&] { answer_record_from_json(j); }) == ErrorCode::ParseError);
}

TEST_CASE("label_ranking over recorded pages") {
  TempDir dir;
  RunStore store(dir.path());
  auto fx = std::filesystem::path(MEDSEEK_FIXTURES) / "replay";
  auto topics = load_topics(fx / "topics.xml", 2022);
  const Topic& topic = *find_topic(topics, 101);

  LlmGateway gw(store);
  gw.register_provider("stub", StubResponder::from_file(fx / "stub.json"));
  PageFetcher pages(std::make_shared<FixturePageSource>(fx / "pages"), store);
  Bm25Scorer bm25;
  ModelSpec reader;
  reader.provider = "stub";
  reader.model_id = "reader";
  LabelingSetup setup{gw, reader, bm25, pages, PassageWindow{}, 4, "t"};

  RateLimitPolicy policy;
  policy.min_interval = std::chrono::milliseconds(0);
  SerpClient google(Engine::Google, std::make_shared<FixtureSerpProvider>(fx / "serps" / "google"), policy);
  auto serp = google.search(topic.id, topic.question, 5);
  auto records = label_ranking(serp, topic, setup);
  REQUIRE(records.size() == 5);
  // Recorded pages for this ranking: correct, silent, incorrect, correct, silent.
  std::vector<AnswerLabel> expected{AnswerLabel::No, AnswerLabel::NoAnswer, AnswerLabel::Yes, AnswerLabel::No,
                                    AnswerLabel::NoAnswer};
  for (size_t i = 0; i < records.size(); ++i) {
    CAPTURE(i);
    CHECK(records[i].rank == static_cast<int>(i) + 1);
    CHECK(records[i].label == expected[i]);
    CHECK(records[i].correct == (expected[i] == AnswerLabel::No));
    CHECK(records[i].passage_index >= 0);
    CHECK(records[i].run_id == "t");
  }
}

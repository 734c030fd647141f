#include <doctest.h>

#include "medseek/error.hpp"
#include "medseek/memorization.hpp"
#include "test_support.hpp"

using namespace medseek;

namespace {

class ConstScorer final : public PassageScorer {
 public:
  explicit ConstScorer(double v) : v_(v) {}
  std::vector<double> score(const std::string&, const std::vector<std::string>& p) override {
    return std::vector<double>(p.size(), v_);
  }
  std::string id() const override { return "const"; }
  bool is_live() const override { return false; }

 private:
  double v_;
};

Topic topic() {
  Topic t;
  t.id = 1;
  t.query = "honey cough";
  t.question = "Can honey soothe a cough?";
  t.stance = BinaryStance::Yes;
  t.narrative = "Documents saying honey helps are helpful.";
  t.year = 2021;
  return t;
}

}  // namespace

TEST_CASE("general and guided prompts") {
  auto g = build_general_prompt(topic());
  CHECK(g.find("Query: honey cough, Question: Can honey soothe a cough?, Answer: yes, Narrative:") !=
        std::string::npos);
  CHECK(g.find("TREC") == std::string::npos);
  auto guided = build_guided_prompt(topic(), 2021);
  CHECK(guided.find("TREC 2021 Health Misinformation") != std::string::npos);
  CHECK(guided.substr(guided.size() - 10) == "Narrative:");
  CHECK(error_code_of([] { build_guided_prompt(topic(), 2019); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Levenshtein similarity") {
  CHECK(levenshtein_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7));
  CHECK(levenshtein_similarity("", "") == 1.0);
  CHECK(levenshtein_similarity("abc", "") == 0.0);
  CHECK(levenshtein_similarity("same", "same") == 1.0);
  // Code points, not bytes.
  CHECK(levenshtein_similarity("café", "cafe") == doctest::Approx(0.75));
}

TEST_CASE("ROUGE-L") {
  CHECK(rouge_l("the cat sat", "the cat sat on the mat") == doctest::Approx(2.0 / 3));
  CHECK(rouge_l("a b c", "a b c") == doctest::Approx(1.0));
  CHECK(rouge_l("", "") == 1.0);
  CHECK(rouge_l("x", "") == 0.0);
  CHECK(rouge_l("x y", "z w") == 0.0);
}

TEST_CASE("similarity triple validates the semantic score") {
  ConstScorer ok(0.4);
  auto s = similarity("a b", "a b", &ok);
  CHECK(s.levenshtein == 1.0);
  CHECK(s.rouge_l == doctest::Approx(1.0));
  CHECK(s.semantic == std::optional<double>(0.4));
  CHECK_FALSE(similarity("a", "b", nullptr).semantic);
  ConstScorer bad(1.5);
  CHECK(error_code_of([&] { similarity("a", "b", &bad); }) == ErrorCode::ScorerUnavailable);
}

TEST_CASE("guided completions that copy the reference are flagged") {
  std::vector<CompletionPair> pairs;
  for (int i = 0; i < 6; ++i) {
    std::string ref = "reference narrative number " + std::to_string(i) + " with some words";
    std::string general(static_cast<size_t>(10 + i), 'z');
    pairs.push_back({i, general, ref, ref});
  }
  auto report = contamination_report(pairs);
  CHECK(report.pairs == 6);
  REQUIRE(report.metrics.size() == 2);
  CHECK(report.metrics[0].metric == "levenshtein");
  CHECK(report.metrics[1].metric == "rouge_l");
  for (const auto& m : report.metrics) {
    CHECK(m.mean_guided == doctest::Approx(1.0));
    CHECK(m.p_value == doctest::Approx(1.0 / 64));
    CHECK(m.flagged);
  }
  ConstScorer sem(0.5);
  auto with_sem = contamination_report(pairs, &sem);
  REQUIRE(with_sem.metrics.size() == 3);
  CHECK(with_sem.metrics[1].metric == "bleurt");
  CHECK_FALSE(with_sem.metrics[1].flagged);
}

TEST_CASE("never flagged when guided is not more similar") {
  std::vector<CompletionPair> pairs;
  for (int i = 0; i < 8; ++i) {
    std::string ref = "ref " + std::to_string(i);
    pairs.push_back({i, ref, i % 2 ? ref : "unrelated words entirely", ref});
  }
  auto report = contamination_report(pairs);
  for (const auto& m : report.metrics) CHECK_FALSE(m.flagged);
}

TEST_CASE("too few pairs") {
  std::vector<CompletionPair> one{{1, "a", "b", "c"}};
  CHECK(error_code_of([&] { contamination_report(one); }) == ErrorCode::TooFewPairs);
  std::vector<CompletionPair> empty_ref{{1, "a", "b", ""}, {2, "a", "b", "c"}};
  CHECK(error_code_of([&] { contamination_report(empty_ref); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("completion pairs come from the gateway with the output cap lifted") {
  TempDir dir;
  RunStore store(dir.path());
  LlmGateway gw(store);
  gw.register_provider("stub", StubResponder::from_file(std::filesystem::path(MEDSEEK_FIXTURES) / "replay" / "stub.json"));
  auto topics = load_topics(std::filesystem::path(MEDSEEK_FIXTURES) / "replay" / "topics.xml", 2022);
  ModelSpec m;
  m.provider = "stub";
  m.model_id = "model-a";
  auto pairs = gather_completion_pairs(topics, 2022, m, gw);
  REQUIRE(pairs.size() == 5);
  for (const auto& p : pairs) CHECK(p.guided_text == p.reference);
  for (const auto& rec : store.records(RecordKind::Completion))
    CHECK(rec.payload["model"]["max_output_tokens"] == 0);

  auto report = contamination_report(pairs);
  std::vector<MemorizationRow> rows{{"model-a (2022)", report}};
  auto md = render_memorization_markdown(rows);
  CHECK(md.find("| Model | Version | Levenshtein | ROUGE |") != std::string::npos);
  CHECK(md.find("1.00*") != std::string::npos);
  auto csv = render_memorization_csv(rows);
  CHECK(csv.rfind("model,metric,pairs,mean_general,mean_guided,p_value,flagged\n", 0) == 0);
}

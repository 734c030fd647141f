#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medseek/llm_gateway.hpp"
#include "medseek/passages_rank.hpp"
#include "medseek/serp.hpp"
#include "medseek/topics.hpp"

namespace medseek {

// The experimental grid for one topic set.
struct RunPlan {
  std::vector<ModelSpec> models;
  std::vector<PromptKind> prompt_kinds;
  std::vector<int> shots{0};      // subset of {0, 1, 2, 3}
  std::vector<int> rag_ranks;     // subset of {1..5}
  int concat_top = 0;             // >0 adds one RAG table over ranks 1..k joined
  int topic_set = 2022;
  std::vector<DemoPair> demo_pairs = default_demo_pairs();
  std::optional<int> demo_year = 2021;
  Engine rag_engine = Engine::Google;
  size_t max_in_flight = 4;

  void validate() const;
};

// Models may be inline objects or names looked up in `named_models`.
RunPlan run_plan_from_json(const nlohmann::json& j, const std::map<std::string, ModelSpec>& named_models = {});

enum class RunTable { ZeroShot, FewShot, Rag };

std::string_view to_string(RunTable t);
RunTable run_table_from_string(std::string_view s);

// One grid cell. `correct` is always definite: unparsable answers and
// provider failures are incorrect.
struct AnswerRow {
  RunTable table = RunTable::ZeroShot;
  std::string model_id;
  PromptKind kind = PromptKind::NoContext;
  int shots = 0;
  int rag_rank = 0;    // 1..5 for single-passage RAG
  int concat_top = 0;  // k for concatenated RAG
  int topic_id = 0;
  int year = 0;
  std::optional<BinaryStance> predicted;
  BinaryStance truth = BinaryStance::No;
  bool correct = false;
  bool no_evidence = false;
  std::string error;  // provider failure for this cell, empty when fine

  bool operator==(const AnswerRow&) const = default;
};

nlohmann::json to_json(const AnswerRow& row);
AnswerRow answer_row_from_json(const nlohmann::json& j);

// Identity of a row within its table (everything except the outcome).
std::string answer_row_key(const AnswerRow& row);

// Full cross product model x kind x topic for shot count 0.
std::vector<AnswerRow> run_zero_shot(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway);

// k-shot cells use the first k demo pairs. Throws DemoTopicOverlap when a
// demo question is one of the evaluated topics.
std::vector<AnswerRow> run_few_shot(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway);

// Zero- and few-shot together, ordered by (model, kind, shots, topic id).
std::vector<AnswerRow> run_llm_grid(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway);

inline constexpr std::string_view kNoEvidence = "(no evidence retrieved)";

std::string build_rag_prompt(const std::string& question, const std::string& evidence, PromptKind kind);

struct RagSetup {
  LlmGateway& gateway;
  PassageScorer& scorer;
  PageFetcher& pages;
  PassageWindow window;
};

// `serps` maps topic id to that topic's SERP. Ordered by (model, kind,
// rank, topic id); concatenated tables follow the single-rank ones.
std::vector<AnswerRow> run_rag(const RunPlan& plan, const std::vector<Topic>& topics,
                               const std::map<int, Serp>& serps, RagSetup& setup);

}  // namespace medseek

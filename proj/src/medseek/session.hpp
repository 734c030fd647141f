#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medseek/answer_extraction.hpp"
#include "medseek/extraction.hpp"
#include "medseek/llm_gateway.hpp"
#include "medseek/memorization.hpp"
#include "medseek/passages_rank.hpp"
#include "medseek/qa_runner.hpp"
#include "medseek/report.hpp"
#include "medseek/run_store.hpp"
#include "medseek/serp.hpp"
#include "medseek/topics.hpp"

namespace medseek {

struct SessionOptions {
  std::filesystem::path config;  // may be empty: built-in defaults only
  std::filesystem::path store;   // empty: the config's "store" entry, else ./store
  bool offline = false;
  std::optional<size_t> budget;  // live LLM calls
};

// Everything one CLI invocation needs: config, store, providers and caches.
// Relative paths inside the config resolve against the config's directory.
class Session {
 public:
  explicit Session(SessionOptions opts);
  ~Session();

  RunStore& store() { return *store_; }
  const nlohmann::json& config() const { return config_; }

  // Topics from `path` (or the configured file) for `year` (or the configured year).
  std::vector<Topic> topics(const std::optional<std::filesystem::path>& path = {},
                            std::optional<int> year = {}) const;
  int topic_year() const;

  std::vector<Engine> configured_engines() const;
  int serp_depth() const { return depth_; }

  Serp serp(Engine engine, const Topic& topic);
  std::vector<Serp> fetch_serps(const std::vector<Engine>& engines, const std::vector<Topic>& topics);

  // Fetches the pages of every stored SERP entry for the engines and topics.
  std::vector<PageText> fetch_pages(const std::vector<Engine>& engines, const std::vector<Topic>& topics);

  std::vector<EntryEvidence> rank_passages(Engine engine, const Topic& topic);

  // Reading-comprehension labels for every entry, persisted to the store.
  std::vector<AnswerRecord> se_answers(const std::vector<Engine>& engines, const std::vector<Topic>& topics);

  RunPlan load_plan(const std::filesystem::path& plan_file) const;
  std::vector<AnswerRow> llm_run(const RunPlan& plan, const std::vector<Topic>& topics);
  std::vector<AnswerRow> rag_run(const RunPlan& plan, const std::vector<Topic>& topics);

  // Persists the pairs and returns the contamination summary.
  MemorizationRow memcheck_run(const std::string& model_name, const std::vector<Topic>& topics, int year,
                               const std::optional<std::string>& semantic_endpoint);

  // JSON lines for every universal-failure topic and model, with uncapped
  // completions and blank category/rationale fields to fill in.
  std::string export_errors(PromptKind kind, const std::vector<Topic>& topics);

  const ModelSpec& model(const std::string& name) const;
  const std::map<std::string, ModelSpec>& models() const { return models_; }

  // Adapter calls made by this session: SERP, page, LLM and remote scorer.
  size_t provider_calls() const;

 private:
  std::filesystem::path resolve(const std::string& p) const;
  SerpClient& client(Engine engine);
  PassageScorer& scorer() { return *scorer_; }
  LabelingSetup labeling_setup();

  SessionOptions opts_;
  nlohmann::json config_;
  std::filesystem::path base_dir_;
  std::unique_ptr<RunStore> store_;
  CacheOptions cache_;
  int depth_ = 20;
  size_t max_in_flight_ = 8;
  PassageWindow window_;
  RateLimitPolicy rate_limit_;
  std::map<Engine, std::unique_ptr<SerpClient>> clients_;
  std::unique_ptr<PageFetcher> pages_;
  std::unique_ptr<PassageScorer> raw_scorer_;
  std::unique_ptr<PassageScorer> scorer_;
  std::unique_ptr<LlmGateway> gateway_;
  std::map<std::string, ModelSpec> models_;
  std::optional<std::string> reader_;
  std::vector<std::unique_ptr<RemoteScorer>> semantic_scorers_;
};

}  // namespace medseek

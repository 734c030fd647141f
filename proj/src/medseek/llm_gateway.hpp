#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "medseek/run_store.hpp"
#include "medseek/topics.hpp"

namespace medseek {

struct ModelSpec {
  std::string provider;
  std::string model_id;
  std::optional<std::string> knowledge_cutoff;  // ISO date
  int max_output_tokens = 16;                   // 0 means no limit
  double temperature = 0.0;

  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

nlohmann::json to_json(const ModelSpec& m);
ModelSpec model_spec_from_json(const nlohmann::json& j);

enum class PromptKind { NoContext, NonExpert, Expert };

std::string_view to_string(PromptKind k);
PromptKind prompt_kind_from_string(std::string_view s);
const std::vector<PromptKind>& all_prompt_kinds();

struct Completion {
  ModelSpec model;
  std::string prompt;
  std::string raw_text;  // provider output, untouched
  bool cached = false;
  std::string created_at;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string complete(const ModelSpec& model, const std::string& prompt) = 0;
  virtual bool is_live() const = 0;
};

// Offline responder. The file is a JSON object mapping SHA-256(prompt) hex
// digests to completion text. Two optional reserved keys extend it: "rules",
// an ordered list of {"contains": substring, "text": reply, "model": id} tried
// on a hash miss (a rule with a model only answers that model), and
// "default", the reply when nothing else matches. With neither, a miss is a
// ProviderError.
class StubResponder final : public LlmProvider {
 public:
  explicit StubResponder(nlohmann::json table);
  static std::shared_ptr<StubResponder> from_file(const std::filesystem::path& path);

  std::string complete(const ModelSpec& model, const std::string& prompt) override;
  bool is_live() const override { return false; }

 private:
  std::map<std::string, std::string> by_hash_;
  struct Rule {
    std::string contains;
    std::string text;
    std::string model;
  };
  std::vector<Rule> rules_;
  std::optional<std::string> fallback_;
};

// POST {model_id, prompt, temperature, max_tokens} -> {text}, bearer key.
class HttpLlmProvider final : public LlmProvider {
 public:
  HttpLlmProvider(std::string endpoint, std::string api_key,
                  std::chrono::milliseconds timeout = std::chrono::seconds(120))
      : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {}
  std::string complete(const ModelSpec& model, const std::string& prompt) override;
  bool is_live() const override { return true; }

 private:
  std::string endpoint_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

struct GatewayOptions {
  bool offline = false;
  std::optional<size_t> live_call_budget;
  std::string run_id = "default";
};

std::string completion_cache_key(const ModelSpec& model, const std::string& prompt);

// Provider-neutral completion access with a write-through cache.
class LlmGateway {
 public:
  LlmGateway(RunStore& store, GatewayOptions opts = {});

  void register_provider(const std::string& name, std::shared_ptr<LlmProvider> provider);
  bool has_provider(const std::string& name) const;

  // Hit: stored completion, cached=true. Miss: provider call, then persist.
  // Throws ProviderError, BudgetExceeded, OfflineCacheMiss.
  Completion complete(const ModelSpec& model, const std::string& prompt);

  size_t provider_calls() const { return provider_calls_.load(); }
  size_t live_calls() const { return live_calls_.load(); }

 private:
  RunStore& store_;
  GatewayOptions opts_;
  std::map<std::string, std::shared_ptr<LlmProvider>> providers_;
  std::mutex budget_mu_;
  std::atomic<size_t> provider_calls_{0};
  std::atomic<size_t> live_calls_{0};
};

// Fixed instruction appended to zero-shot questions.
inline constexpr std::string_view kYesNoSuffix = "Answer only 'yes' or 'no'.";
inline constexpr std::string_view kNonExpertContext = "I am a non-expert user searching for medical advice online";
inline constexpr std::string_view kExpertContext =
    "We are a committee of leading scientific experts and medical doctors reviewing the latest and highest "
    "quality of research from PubMED. For each question, we have chosen an answer, either 'yes' or 'no', based "
    "on our best understanding of current medical practice and literature.";

// Context sentence for a prompt kind; empty for NoContext.
std::string_view context_block(PromptKind kind);

std::string build_qa_prompt(const std::string& question, PromptKind kind);

struct DemoPair {
  std::string question;
  std::string answer;
  bool operator==(const DemoPair&) const = default;
};

// Three fixed (question, answer) demonstrations from the 2021 topic set.
const std::vector<DemoPair>& default_demo_pairs();

// Throws EmptyDemos for an empty list and InvalidArgument for more than three.
std::string build_fewshot_prompt(const std::string& question, PromptKind kind, const std::vector<DemoPair>& demos);

// First "yes"/"no" among the first 10 whitespace tokens, punctuation stripped,
// case-insensitive. nullopt means the answer was unparsable.
std::optional<BinaryStance> parse_binary_answer(std::string_view raw_text);

}  // namespace medseek

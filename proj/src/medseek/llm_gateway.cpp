#include "medseek/llm_gateway.hpp"

#include <cctype>

#include "medseek/error.hpp"
#include "medseek/http.hpp"
#include "medseek/text.hpp"

namespace medseek {

void ModelSpec::validate() const {
  if (model_id.empty()) throw Error(ErrorCode::InvalidArgument, "model_id must not be empty");
  if (!(temperature >= 0.0)) throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  if (max_output_tokens < 0) throw Error(ErrorCode::InvalidArgument, "max_output_tokens must be >= 0");
}

nlohmann::json to_json(const ModelSpec& m) {
  nlohmann::json j = {{"provider", m.provider},
                      {"model_id", m.model_id},
                      {"max_output_tokens", m.max_output_tokens},
                      {"temperature", m.temperature}};
  if (m.knowledge_cutoff) j["knowledge_cutoff"] = *m.knowledge_cutoff;
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec m;
  try {
    m.provider = j.at("provider").get<std::string>();
    m.model_id = j.at("model_id").get<std::string>();
    if (j.contains("knowledge_cutoff") && j["knowledge_cutoff"].is_string())
      m.knowledge_cutoff = j["knowledge_cutoff"].get<std::string>();
    m.max_output_tokens = j.value("max_output_tokens", 16);
    m.temperature = j.value("temperature", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model spec: ") + e.what());
  }
  m.validate();
  return m;
}

std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::NoContext: return "no_context";
    case PromptKind::NonExpert: return "non_expert";
    case PromptKind::Expert: return "expert";
  }
  return "?";
}

PromptKind prompt_kind_from_string(std::string_view s) {
  auto v = text::to_lower(s);
  if (v == "no_context" || v == "no-context") return PromptKind::NoContext;
  if (v == "non_expert" || v == "non-expert") return PromptKind::NonExpert;
  if (v == "expert") return PromptKind::Expert;
  throw Error(ErrorCode::InvalidArgument, "unknown prompt kind '" + std::string(s) + "'");
}

const std::vector<PromptKind>& all_prompt_kinds() {
  static const std::vector<PromptKind> kinds{PromptKind::NoContext, PromptKind::NonExpert, PromptKind::Expert};
  return kinds;
}

StubResponder::StubResponder(nlohmann::json table) {
  if (!table.is_object()) throw Error(ErrorCode::ParseError, "stub responder table must be a JSON object");
  for (auto& [key, value] : table.items()) {
    if (key == "rules") {
      for (const auto& rule : value)
        rules_.push_back({rule.at("contains").get<std::string>(), rule.at("text").get<std::string>(),
                          rule.value("model", "")});
    } else if (key == "default") {
      fallback_ = value.get<std::string>();
    } else {
      by_hash_[text::to_lower(key)] = value.get<std::string>();
    }
  }
}

std::shared_ptr<StubResponder> StubResponder::from_file(const std::filesystem::path& path) {
  try {
    return std::make_shared<StubResponder>(nlohmann::json::parse(text::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::string StubResponder::complete(const ModelSpec& model, const std::string& prompt) {
  if (auto it = by_hash_.find(text::sha256_hex(prompt)); it != by_hash_.end()) return it->second;
  for (const auto& rule : rules_) {
    if (!rule.model.empty() && rule.model != model.model_id) continue;
    if (prompt.find(rule.contains) != std::string::npos) return rule.text;
  }
  if (fallback_) return *fallback_;
  throw ProviderError("stub responder has no entry for this prompt (model " + model.model_id + ")", 404);
}

std::string HttpLlmProvider::complete(const ModelSpec& model, const std::string& prompt) {
  nlohmann::json req = {{"model_id", model.model_id},
                        {"prompt", prompt},
                        {"temperature", model.temperature},
                        {"max_tokens", model.max_output_tokens}};
  http::Options opts;
  opts.timeout = timeout_;
  if (!api_key_.empty()) opts.headers.push_back("Authorization: Bearer " + api_key_);
  http::Response resp;
  try {
    resp = http::post_json(endpoint_, req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), opts);
  } catch (const Error& e) {
    throw ProviderError(e.what(), 0);
  }
  if (resp.status != 200)
    throw ProviderError(endpoint_ + " returned HTTP " + std::to_string(resp.status), resp.status);
  try {
    return nlohmann::json::parse(resp.body).at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("bad completion response: ") + e.what(), resp.status);
  }
}

std::string completion_cache_key(const ModelSpec& model, const std::string& prompt) {
  nlohmann::json parts = {model.model_id, prompt, model.temperature, model.max_output_tokens};
  return text::sha256_hex(RunStore::canonical_dump(parts));
}

LlmGateway::LlmGateway(RunStore& store, GatewayOptions opts) : store_(store), opts_(std::move(opts)) {}

void LlmGateway::register_provider(const std::string& name, std::shared_ptr<LlmProvider> provider) {
  providers_[name] = std::move(provider);
}

bool LlmGateway::has_provider(const std::string& name) const {
  return providers_.contains(name);
}

Completion LlmGateway::complete(const ModelSpec& model, const std::string& prompt) {
  model.validate();
  auto key = completion_cache_key(model, prompt);
  if (auto hit = store_.find(RecordKind::Completion, key)) {
    Completion c;
    c.model = model;
    c.prompt = hit->payload.at("prompt").get<std::string>();
    c.raw_text = hit->payload.at("raw_text").get<std::string>();
    c.created_at = hit->created_at;
    c.cached = true;
    return c;
  }

  auto it = providers_.find(model.provider);
  if (it == providers_.end())
    throw ProviderError("no provider adapter named '" + model.provider + "'", 0);
  auto& provider = *it->second;
  if (provider.is_live()) {
    if (opts_.offline)
      throw Error(ErrorCode::OfflineCacheMiss, "offline: completion not cached for model " + model.model_id);
    std::lock_guard lock(budget_mu_);
    if (opts_.live_call_budget && live_calls_ >= *opts_.live_call_budget)
      throw Error(ErrorCode::BudgetExceeded,
                  "live call budget of " + std::to_string(*opts_.live_call_budget) + " exhausted");
    ++live_calls_;
  }
  ++provider_calls_;
  auto raw = provider.complete(model, prompt);

  nlohmann::json payload = {{"model", to_json(model)}, {"prompt", prompt}, {"raw_text", raw}};
  auto rec = store_.append(RecordKind::Completion, key, payload, opts_.run_id);
  Completion c;
  c.model = model;
  c.prompt = rec.payload.at("prompt").get<std::string>();
  c.raw_text = rec.payload.at("raw_text").get<std::string>();
  c.created_at = rec.created_at;
  c.cached = false;
  return c;
}

std::string_view context_block(PromptKind kind) {
  switch (kind) {
    case PromptKind::NoContext: return {};
    case PromptKind::NonExpert: return kNonExpertContext;
    case PromptKind::Expert: return kExpertContext;
  }
  return {};
}

std::string build_qa_prompt(const std::string& question, PromptKind kind) {
  std::string out;
  if (auto ctx = context_block(kind); !ctx.empty()) {
    out += ctx;
    out += '\n';
  }
  out += question;
  out += '\n';
  out += kYesNoSuffix;
  return out;
}

const std::vector<DemoPair>& default_demo_pairs() {
  static const std::vector<DemoPair> pairs{
      {"Will wearing an ankle brace help heal achilles tendonitis?", "No"},
      {"Does yoga help manage asthma?", "Yes"},
      {"Is starving a fever effective?", "No"},
  };
  return pairs;
}

std::string build_fewshot_prompt(const std::string& question, PromptKind kind, const std::vector<DemoPair>& demos) {
  if (demos.empty()) throw Error(ErrorCode::EmptyDemos, "few-shot prompt needs at least one demonstration");
  if (demos.size() > 3) throw Error(ErrorCode::InvalidArgument, "at most three demonstrations are supported");
  std::string out;
  if (auto ctx = context_block(kind); !ctx.empty()) {
    out += ctx;
    out += '\n';
  }
  for (const auto& d : demos) out += "Question: " + d.question + "\nAnswer: " + d.answer + "\n";
  out += "Question: " + question + "\nAnswer:";
  return out;
}

std::optional<BinaryStance> parse_binary_answer(std::string_view raw_text) {
  auto words = text::split_words(raw_text);
  if (words.size() > 10) words.resize(10);
  for (const auto& w : words) {
    std::string token;
    for (char c : w)
      if (std::isalnum(static_cast<unsigned char>(c))) token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (token == "yes") return BinaryStance::Yes;
    if (token == "no") return BinaryStance::No;
  }
  return std::nullopt;
}

}  // namespace medseek

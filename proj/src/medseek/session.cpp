#include "medseek/session.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>

#include "medseek/error.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

std::string env_key(std::string_view prefix_name) {
  std::string var = "MEDSEEK_";
  for (char c : prefix_name) var += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : '_';
  var += "_KEY";
  const char* v = std::getenv(var.c_str());
  return v ? std::string(v) : std::string{};
}

std::chrono::milliseconds ms(const nlohmann::json& j, const char* key, long fallback) {
  return std::chrono::milliseconds(j.value(key, fallback));
}

}  // namespace

Session::Session(SessionOptions opts) : opts_(std::move(opts)) {
  config_ = nlohmann::json::object();
  if (!opts_.config.empty()) {
    try {
      config_ = nlohmann::json::parse(text::read_file(opts_.config));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "config " + opts_.config.string() + ": " + e.what());
    }
    base_dir_ = std::filesystem::absolute(opts_.config).parent_path();
  } else {
    base_dir_ = std::filesystem::current_path();
  }

  std::filesystem::path store_dir = opts_.store;
  if (store_dir.empty()) store_dir = config_.contains("store") ? resolve(config_["store"].get<std::string>()) : "store";
  store_ = std::make_unique<RunStore>(store_dir);

  try {
    cache_.offline = opts_.offline;
    cache_.run_id = config_.value("run_id", "default");
    depth_ = config_.value("depth", 20);
    max_in_flight_ = config_.value("max_in_flight", size_t{8});
    if (config_.contains("passages")) {
      window_.window_words = config_["passages"].value("window", 120);
      window_.stride_words = config_["passages"].value("stride", 60);
    }
    if (config_.contains("rate_limit")) {
      const auto& rl = config_["rate_limit"];
      rate_limit_.min_interval = ms(rl, "min_interval_ms", 2000);
      rate_limit_.max_retries = rl.value("max_retries", 4);
      rate_limit_.backoff_base = ms(rl, "backoff_base_ms", 1000);
    }

    std::shared_ptr<PageSource> source;
    const auto pages = config_.value("pages", nlohmann::json{{"type", "live"}});
    const auto page_type = pages.value("type", "live");
    if (page_type == "fixture") {
      source = std::make_shared<FixturePageSource>(resolve(pages.at("dir").get<std::string>()));
    } else if (page_type == "live") {
      http::Options o;
      o.timeout = ms(pages, "timeout_ms", 15000);
      source = std::make_shared<LivePageSource>(o);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown page source type '" + page_type + "'");
    }
    pages_ = std::make_unique<PageFetcher>(source, *store_, cache_);

    const auto sc = config_.value("scorer", nlohmann::json{{"type", "bm25"}});
    const auto scorer_type = sc.value("type", "bm25");
    if (scorer_type == "bm25") {
      scorer_ = std::make_unique<Bm25Scorer>(sc.value("k1", 1.2), sc.value("b", 0.75));
    } else if (scorer_type == "neural") {
      raw_scorer_ = std::make_unique<RemoteScorer>(sc.at("endpoint").get<std::string>(), ms(sc, "timeout_ms", 60000));
      scorer_ = std::make_unique<CachedScorer>(*raw_scorer_, *store_, cache_);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown scorer type '" + scorer_type + "'");
    }

    GatewayOptions g;
    g.offline = opts_.offline;
    g.live_call_budget = opts_.budget;
    g.run_id = cache_.run_id;
    gateway_ = std::make_unique<LlmGateway>(*store_, g);
    const auto providers = config_.value("providers", nlohmann::json::object());
    for (const auto& [name, p] : providers.items()) {
      const auto type = p.value("type", "stub");
      if (type == "stub")
        gateway_->register_provider(name, StubResponder::from_file(resolve(p.at("file").get<std::string>())));
      else if (type == "http")
        gateway_->register_provider(name, std::make_shared<HttpLlmProvider>(p.at("endpoint").get<std::string>(),
                                                                            env_key(name), ms(p, "timeout_ms", 120000)));
      else
        throw Error(ErrorCode::InvalidArgument, "unknown provider type '" + type + "' for " + name);
    }
    const auto models = config_.value("models", nlohmann::json::object());
    for (const auto& [name, m] : models.items())
      models_.emplace(name, model_spec_from_json(m));
    if (config_.contains("reader")) reader_ = config_["reader"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
}

Session::~Session() = default;

std::filesystem::path Session::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir_ / path;
}

int Session::topic_year() const {
  return config_.contains("topics") ? config_["topics"].value("year", 2022) : 2022;
}

std::vector<Topic> Session::topics(const std::optional<std::filesystem::path>& path, std::optional<int> year) const {
  std::filesystem::path file;
  if (path) {
    file = *path;
  } else if (config_.contains("topics") && config_["topics"].contains("path")) {
    file = resolve(config_["topics"]["path"].get<std::string>());
  } else {
    throw Error(ErrorCode::InvalidArgument, "no topic file given and none configured");
  }
  const int y = year.value_or(topic_year());
  TopicSchema schema;
  if (config_.contains("topic_aliases")) {
    const auto key = std::to_string(y);
    if (config_["topic_aliases"].contains(key)) {
      const auto& a = config_["topic_aliases"][key];
      schema.tag_aliases = a.value("tags", std::map<std::string, std::string>{});
      schema.stance_aliases = a.value("stances", std::map<std::string, std::string>{});
    }
  }
  return load_topics(file, y, schema);
}

std::vector<Engine> Session::configured_engines() const {
  std::vector<Engine> out;
  for (auto e : all_engines())
    if (config_.contains("engines") && config_["engines"].contains(std::string(to_string(e)))) out.push_back(e);
  return out;
}

SerpClient& Session::client(Engine engine) {
  auto it = clients_.find(engine);
  if (it != clients_.end()) return *it->second;
  const auto name = std::string(to_string(engine));
  if (!config_.contains("engines") || !config_["engines"].contains(name))
    throw Error(ErrorCode::InvalidArgument, "engine " + name + " is not configured");
  const auto& c = config_["engines"][name];
  const auto type = c.value("type", "fixture");
  std::shared_ptr<SerpProvider> provider;
  if (type == "fixture")
    provider = std::make_shared<FixtureSerpProvider>(resolve(c.at("dir").get<std::string>()));
  else if (type == "api")
    provider = std::make_shared<JsonApiSerpProvider>(c.at("endpoint").get<std::string>(), env_key(name),
                                                     ms(c, "timeout_ms", 15000));
  else if (type == "duckduckgo_html")
    provider = std::make_shared<DuckDuckGoHtmlProvider>(c.value("endpoint", "https://html.duckduckgo.com/html/"));
  else
    throw Error(ErrorCode::InvalidArgument, "unknown engine type '" + type + "' for " + name);
  auto& slot = clients_[engine];
  slot = std::make_unique<SerpClient>(engine, provider, rate_limit_);
  return *slot;
}

Serp Session::serp(Engine engine, const Topic& topic) {
  return cached_search(client(engine), topic.id, topic.question, depth_, *store_, cache_);
}

std::vector<Serp> Session::fetch_serps(const std::vector<Engine>& engines, const std::vector<Topic>& topics) {
  std::vector<Serp> out;
  for (auto e : engines)
    for (const auto& t : topics) out.push_back(serp(e, t));
  return out;
}

std::vector<PageText> Session::fetch_pages(const std::vector<Engine>& engines, const std::vector<Topic>& topics) {
  std::vector<std::string> urls;
  std::set<std::string> seen;
  for (const auto& s : fetch_serps(engines, topics))
    for (const auto& e : s.entries)
      if (seen.insert(canonicalize_url(e.url)).second) urls.push_back(e.url);
  return pages_->fetch_all(urls, max_in_flight_);
}

std::vector<EntryEvidence> Session::rank_passages(Engine engine, const Topic& topic) {
  return select_evidence(serp(engine, topic), topic.question, *pages_, *scorer_, window_, max_in_flight_);
}

const ModelSpec& Session::model(const std::string& name) const {
  auto it = models_.find(name);
  if (it != models_.end()) return it->second;
  for (const auto& [n, m] : models_)
    if (m.model_id == name) return m;
  throw Error(ErrorCode::InvalidArgument, "model '" + name + "' is not configured");
}

LabelingSetup Session::labeling_setup() {
  if (!reader_) throw Error(ErrorCode::InvalidArgument, "no reader model configured");
  return LabelingSetup{*gateway_, model(*reader_), *scorer_, *pages_, window_, max_in_flight_, cache_.run_id};
}

std::vector<AnswerRecord> Session::se_answers(const std::vector<Engine>& engines, const std::vector<Topic>& topics) {
  auto setup = labeling_setup();
  const auto reader_id = setup.reader.model_id;
  const auto scorer_id = scorer_->id();
  std::vector<AnswerRecord> out;
  for (auto e : engines) {
    for (const auto& t : topics) {
      for (const auto& r : label_ranking(serp(e, t), t, setup)) {
        store_->append(RecordKind::Answer, se_record_key(r, reader_id, scorer_id), se_payload(r, reader_id, scorer_id),
                       cache_.run_id);
        out.push_back(r);
      }
    }
  }
  return out;
}

RunPlan Session::load_plan(const std::filesystem::path& plan_file) const {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(plan_file));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "plan " + plan_file.string() + ": " + e.what());
  }
  return run_plan_from_json(j, models_);
}

namespace {

void check_year(const RunPlan& plan, const std::vector<Topic>& topics) {
  for (const auto& t : topics)
    if (t.year != plan.topic_set)
      throw Error(ErrorCode::InvalidArgument, "plan targets topic set " + std::to_string(plan.topic_set) +
                                                  " but topic " + std::to_string(t.id) + " is from " +
                                                  std::to_string(t.year));
}

void persist_rows(RunStore& store, const std::vector<AnswerRow>& rows, const std::string& run_id) {
  for (const auto& r : rows)
    if (r.error.empty()) store.append(RecordKind::Answer, answer_row_key(r), to_json(r), run_id);
}

}  // namespace

std::vector<AnswerRow> Session::llm_run(const RunPlan& plan, const std::vector<Topic>& topics) {
  check_year(plan, topics);
  auto rows = run_llm_grid(plan, topics, *gateway_);
  persist_rows(*store_, rows, cache_.run_id);
  return rows;
}

std::vector<AnswerRow> Session::rag_run(const RunPlan& plan, const std::vector<Topic>& topics) {
  check_year(plan, topics);
  std::map<int, Serp> serps;
  for (const auto& t : topics) serps.emplace(t.id, serp(plan.rag_engine, t));
  RagSetup setup{*gateway_, *scorer_, *pages_, window_};
  auto rows = run_rag(plan, topics, serps, setup);
  persist_rows(*store_, rows, cache_.run_id);
  return rows;
}

MemorizationRow Session::memcheck_run(const std::string& model_name, const std::vector<Topic>& topics, int year,
                                      const std::optional<std::string>& semantic_endpoint) {
  const auto& spec = model(model_name);
  auto pairs = gather_completion_pairs(topics, year, spec, *gateway_, max_in_flight_);
  if (pairs.size() < 2) throw Error(ErrorCode::TooFewPairs, "fewer than two topics carry a narrative");

  RemoteScorer* semantic = nullptr;
  if (semantic_endpoint) {
    semantic_scorers_.push_back(std::make_unique<RemoteScorer>(*semantic_endpoint));
    semantic = semantic_scorers_.back().get();
  }
  std::vector<MemcheckRecord> records;
  for (const auto& p : pairs) {
    MemcheckRecord r{spec.model_id, year, p, std::nullopt, std::nullopt};
    if (semantic) {
      r.semantic_general = similarity(p.general_text, p.reference, semantic).semantic;
      r.semantic_guided = similarity(p.guided_text, p.reference, semantic).semantic;
    }
    records.push_back(std::move(r));
  }
  auto rows = memorization_rows(records);
  for (const auto& r : records)
    store_->append(RecordKind::Answer, memcheck_record_key(r), memcheck_payload(r), cache_.run_id);
  return rows.front();
}

std::string Session::export_errors(PromptKind kind, const std::vector<Topic>& topics) {
  auto view = load_store_view(*store_);
  auto failures = find_universal_failures(view.llm, kind);
  std::set<std::string> model_ids;
  for (const auto& r : view.llm)
    if (r.table == RunTable::ZeroShot && r.kind == kind) model_ids.insert(r.model_id);

  std::ostringstream os;
  for (int id : failures) {
    const Topic* t = find_topic(topics, id);
    if (!t) throw Error(ErrorCode::TopicSetMismatch, "topic " + std::to_string(id) + " is not in the topic file");
    for (const auto& model_id : model_ids) {
      ModelSpec uncapped = model(model_id);
      uncapped.max_output_tokens = 0;
      auto completion = gateway_->complete(uncapped, build_qa_prompt(t->question, kind));
      nlohmann::json line = {{"topic_id", id},
                             {"model", model_id},
                             {"kind", to_string(kind)},
                             {"question", t->question},
                             {"truth", to_string(t->stance)},
                             {"completion", completion.raw_text},
                             {"category", ""},
                             {"rationale", ""}};
      os << line.dump() << '\n';
    }
  }
  return os.str();
}

size_t Session::provider_calls() const {
  size_t n = gateway_->provider_calls() + pages_->source_calls();
  for (const auto& [e, c] : clients_) n += c->provider_calls();
  if (auto* remote = dynamic_cast<RemoteScorer*>(raw_scorer_.get())) n += remote->calls();
  for (const auto& s : semantic_scorers_) n += s->calls();
  return n;
}

}  // namespace medseek

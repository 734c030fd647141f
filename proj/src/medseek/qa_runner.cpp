#include "medseek/qa_runner.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "medseek/error.hpp"
#include "medseek/parallel.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

std::vector<const Topic*> sorted_topics(const std::vector<Topic>& topics) {
  std::vector<const Topic*> out;
  for (const auto& t : topics) out.push_back(&t);
  std::sort(out.begin(), out.end(), [](const Topic* a, const Topic* b) { return a->id < b->id; });
  return out;
}

std::string normalized_question(const std::string& q) {
  return text::to_lower(text::collapse_whitespace(q));
}

void check_demo_overlap(const RunPlan& plan, const std::vector<Topic>& topics) {
  std::set<std::string> evaluated;
  for (const auto& t : topics) evaluated.insert(normalized_question(t.question));
  for (const auto& d : plan.demo_pairs) {
    if (evaluated.contains(normalized_question(d.question)))
      throw Error(ErrorCode::DemoTopicOverlap, "demo question is also an evaluated topic: " + d.question);
  }
}

// Runs every cell with bounded parallelism; each cell fills its own slot.
void fill_rows(std::vector<AnswerRow>& rows, const std::vector<std::string>& prompts,
               const std::vector<const ModelSpec*>& models, LlmGateway& gateway, size_t max_in_flight) {
  parallel_for(rows.size(), max_in_flight, [&](size_t i) {
    auto& row = rows[i];
    try {
      auto completion = gateway.complete(*models[i], prompts[i]);
      row.predicted = parse_binary_answer(completion.raw_text);
    } catch (const Error& e) {
      row.predicted.reset();
      row.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    row.correct = row.predicted && *row.predicted == row.truth;
  });
}

}  // namespace

void RunPlan::validate() const {
  if (models.empty()) throw Error(ErrorCode::InvalidArgument, "plan has no models");
  for (const auto& m : models) m.validate();
  if (prompt_kinds.empty()) throw Error(ErrorCode::InvalidArgument, "plan has no prompt kinds");
  if (shots.empty()) throw Error(ErrorCode::InvalidArgument, "plan needs at least one shot count");
  for (int s : shots)
    if (s < 0 || s > 3) throw Error(ErrorCode::InvalidArgument, "shots must be within {0,1,2,3}");
  for (int r : rag_ranks)
    if (r < 1 || r > 5) throw Error(ErrorCode::InvalidArgument, "rag ranks must be within [1, 5]");
  if (concat_top < 0 || concat_top > 5) throw Error(ErrorCode::InvalidArgument, "concat_top must be within [0, 5]");
  auto max_shots = *std::max_element(shots.begin(), shots.end());
  if (static_cast<int>(demo_pairs.size()) < max_shots)
    throw Error(ErrorCode::InvalidArgument, "plan asks for more shots than demo pairs");
  if (max_shots > 0 && demo_year && *demo_year == topic_set)
    throw Error(ErrorCode::DemoTopicOverlap, "demonstrations must come from a different topic set year");
}

RunPlan run_plan_from_json(const nlohmann::json& j, const std::map<std::string, ModelSpec>& named_models) {
  RunPlan plan;
  try {
    for (const auto& m : j.at("models")) {
      if (m.is_string()) {
        auto it = named_models.find(m.get<std::string>());
        if (it == named_models.end())
          throw Error(ErrorCode::InvalidArgument, "plan references unknown model '" + m.get<std::string>() + "'");
        plan.models.push_back(it->second);
      } else {
        plan.models.push_back(model_spec_from_json(m));
      }
    }
    if (j.contains("prompt_kinds")) {
      for (const auto& k : j["prompt_kinds"]) plan.prompt_kinds.push_back(prompt_kind_from_string(k.get<std::string>()));
    } else {
      plan.prompt_kinds = all_prompt_kinds();
    }
    if (j.contains("shots")) plan.shots = j["shots"].get<std::vector<int>>();
    if (j.contains("rag_ranks")) plan.rag_ranks = j["rag_ranks"].get<std::vector<int>>();
    plan.concat_top = j.value("concat_top", 0);
    plan.topic_set = j.value("topic_set", 2022);
    if (j.contains("demo_pairs")) {
      plan.demo_pairs.clear();
      for (const auto& d : j["demo_pairs"]) {
        if (d.is_array())
          plan.demo_pairs.push_back({d.at(0).get<std::string>(), d.at(1).get<std::string>()});
        else
          plan.demo_pairs.push_back({d.at("question").get<std::string>(), d.at("answer").get<std::string>()});
      }
      plan.demo_year.reset();
    }
    if (j.contains("demo_year")) {
      if (j["demo_year"].is_null())
        plan.demo_year.reset();
      else
        plan.demo_year = j["demo_year"].get<int>();
    }
    if (j.contains("rag_engine")) plan.rag_engine = engine_from_string(j["rag_engine"].get<std::string>());
    plan.max_in_flight = j.value("max_in_flight", size_t{4});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("run plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

std::string_view to_string(RunTable t) {
  switch (t) {
    case RunTable::ZeroShot: return "zero_shot";
    case RunTable::FewShot: return "few_shot";
    case RunTable::Rag: return "rag";
  }
  return "?";
}

RunTable run_table_from_string(std::string_view s) {
  if (s == "zero_shot") return RunTable::ZeroShot;
  if (s == "few_shot") return RunTable::FewShot;
  if (s == "rag") return RunTable::Rag;
  throw Error(ErrorCode::ParseError, "unknown run table '" + std::string(s) + "'");
}

nlohmann::json to_json(const AnswerRow& row) {
  nlohmann::json j = {{"table", to_string(row.table)},
                      {"model", row.model_id},
                      {"kind", to_string(row.kind)},
                      {"shots", row.shots},
                      {"rag_rank", row.rag_rank},
                      {"concat_top", row.concat_top},
                      {"topic_id", row.topic_id},
                      {"year", row.year},
                      {"predicted", row.predicted ? std::string(to_string(*row.predicted)) : std::string("unparsable")},
                      {"truth", to_string(row.truth)},
                      {"correct", row.correct},
                      {"no_evidence", row.no_evidence}};
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

AnswerRow answer_row_from_json(const nlohmann::json& j) {
  try {
    AnswerRow row;
    row.table = run_table_from_string(j.at("table").get<std::string>());
    row.model_id = j.at("model").get<std::string>();
    row.kind = prompt_kind_from_string(j.at("kind").get<std::string>());
    row.shots = j.value("shots", 0);
    row.rag_rank = j.value("rag_rank", 0);
    row.concat_top = j.value("concat_top", 0);
    row.topic_id = j.at("topic_id").get<int>();
    row.year = j.value("year", 0);
    auto predicted = j.at("predicted").get<std::string>();
    if (predicted == "yes") row.predicted = BinaryStance::Yes;
    else if (predicted == "no") row.predicted = BinaryStance::No;
    row.truth = j.at("truth").get<std::string>() == "yes" ? BinaryStance::Yes : BinaryStance::No;
    row.correct = j.at("correct").get<bool>();
    row.no_evidence = j.value("no_evidence", false);
    row.error = j.value("error", "");
    return row;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad answer row: ") + e.what());
  }
}

std::string answer_row_key(const AnswerRow& row) {
  nlohmann::json id = {to_string(row.table), row.model_id, to_string(row.kind), row.shots,
                       row.rag_rank,         row.concat_top, row.topic_id,      row.year};
  return text::sha256_hex(id.dump());
}

namespace {

// Shared driver for the prompt-only grids.
std::vector<AnswerRow> run_prompt_grid(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway,
                                       const std::function<bool(int)>& shot_filter) {
  plan.validate();
  auto ordered = sorted_topics(topics);
  std::vector<int> shots;
  for (int s : plan.shots)
    if (shot_filter(s)) shots.push_back(s);
  std::sort(shots.begin(), shots.end());
  shots.erase(std::unique(shots.begin(), shots.end()), shots.end());
  if (std::any_of(shots.begin(), shots.end(), [](int s) { return s > 0; })) check_demo_overlap(plan, topics);

  std::vector<AnswerRow> rows;
  std::vector<std::string> prompts;
  std::vector<const ModelSpec*> models;
  for (const auto& model : plan.models) {
    for (auto kind : plan.prompt_kinds) {
      for (int k : shots) {
        std::vector<DemoPair> demos(plan.demo_pairs.begin(), plan.demo_pairs.begin() + k);
        for (const Topic* t : ordered) {
          AnswerRow row;
          row.table = k == 0 ? RunTable::ZeroShot : RunTable::FewShot;
          row.model_id = model.model_id;
          row.kind = kind;
          row.shots = k;
          row.topic_id = t->id;
          row.year = t->year;
          row.truth = t->stance;
          rows.push_back(std::move(row));
          prompts.push_back(k == 0 ? build_qa_prompt(t->question, kind) : build_fewshot_prompt(t->question, kind, demos));
          models.push_back(&model);
        }
      }
    }
  }
  fill_rows(rows, prompts, models, gateway, plan.max_in_flight);
  return rows;
}

}  // namespace

std::vector<AnswerRow> run_zero_shot(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway) {
  if (std::find(plan.shots.begin(), plan.shots.end(), 0) == plan.shots.end())
    throw Error(ErrorCode::InvalidArgument, "zero-shot run needs 0 in the plan's shots");
  return run_prompt_grid(plan, topics, gateway, [](int s) { return s == 0; });
}

std::vector<AnswerRow> run_few_shot(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway) {
  if (std::none_of(plan.shots.begin(), plan.shots.end(), [](int s) { return s > 0; }))
    throw Error(ErrorCode::EmptyDemos, "few-shot run needs a shot count of 1..3");
  return run_prompt_grid(plan, topics, gateway, [](int s) { return s > 0; });
}

std::vector<AnswerRow> run_llm_grid(const RunPlan& plan, const std::vector<Topic>& topics, LlmGateway& gateway) {
  return run_prompt_grid(plan, topics, gateway, [](int) { return true; });
}

std::string build_rag_prompt(const std::string& question, const std::string& evidence, PromptKind kind) {
  auto ev = text::trim(evidence);
  if (ev.empty()) throw Error(ErrorCode::InvalidArgument, "RAG prompt needs evidence");
  if (ev.back() == '.') ev.pop_back();
  std::string out;
  if (auto ctx = context_block(kind); !ctx.empty()) {
    out += ctx;
    out += '\n';
  }
  out += "Provide an answer to the question using the provided evidence and contrasting it with your internal "
         "knowledge. Evidence: ";
  out += ev;
  out += ". Question: ";
  out += question;
  out += ". Your answer:";
  return out;
}

std::vector<AnswerRow> run_rag(const RunPlan& plan, const std::vector<Topic>& topics,
                               const std::map<int, Serp>& serps, RagSetup& setup) {
  plan.validate();
  if (plan.rag_ranks.empty() && plan.concat_top == 0)
    throw Error(ErrorCode::InvalidArgument, "plan has no rag_ranks");
  auto ordered = sorted_topics(topics);
  std::vector<int> ranks = plan.rag_ranks;
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  const int deepest = std::max(ranks.empty() ? 0 : ranks.back(), plan.concat_top);

  // Evidence per (topic, rank): empty string when the page yielded nothing.
  std::map<int, std::vector<std::string>> evidence;
  for (const Topic* t : ordered) {
    auto it = serps.find(t->id);
    if (it == serps.end())
      throw Error(ErrorCode::MissingSerp, "no " + std::string(to_string(plan.rag_engine)) + " SERP for topic " +
                                              std::to_string(t->id));
    if (static_cast<int>(it->second.entries.size()) < deepest)
      throw Error(ErrorCode::MissingSerp, "topic " + std::to_string(t->id) + " lacks a rank-" +
                                              std::to_string(deepest) + " result");
    Serp head = it->second;
    head.entries.resize(static_cast<size_t>(deepest));
    auto ev = select_evidence(head, t->question, setup.pages, setup.scorer, setup.window, plan.max_in_flight);
    auto& slot = evidence[t->id];
    for (const auto& e : ev) slot.push_back(e.top ? e.top->passage.text : std::string{});
  }

  std::vector<AnswerRow> rows;
  std::vector<std::string> prompts;
  std::vector<const ModelSpec*> models;
  auto add_cell = [&](const ModelSpec& model, PromptKind kind, const Topic& t, int rank, int concat,
                      const std::string& ev) {
    AnswerRow row;
    row.table = RunTable::Rag;
    row.model_id = model.model_id;
    row.kind = kind;
    row.rag_rank = rank;
    row.concat_top = concat;
    row.topic_id = t.id;
    row.year = t.year;
    row.truth = t.stance;
    row.no_evidence = ev.empty();
    rows.push_back(std::move(row));
    prompts.push_back(build_rag_prompt(t.question, ev.empty() ? std::string(kNoEvidence) : ev, kind));
    models.push_back(&model);
  };

  for (const auto& model : plan.models) {
    for (auto kind : plan.prompt_kinds) {
      for (int rank : ranks)
        for (const Topic* t : ordered) add_cell(model, kind, *t, rank, 0, evidence[t->id][static_cast<size_t>(rank - 1)]);
      if (plan.concat_top > 0) {
        for (const Topic* t : ordered) {
          std::vector<std::string> parts;
          for (int r = 0; r < plan.concat_top; ++r) {
            const auto& p = evidence[t->id][static_cast<size_t>(r)];
            if (!p.empty()) parts.push_back(p);
          }
          add_cell(model, kind, *t, 0, plan.concat_top, text::join(parts, "\n\n"));
        }
      }
    }
  }
  fill_rows(rows, prompts, models, setup.gateway, plan.max_in_flight);
  return rows;
}

}  // namespace medseek

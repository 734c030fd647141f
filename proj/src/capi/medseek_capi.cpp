#include "medseek/medseek.h"

#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "medseek/error.hpp"
#include "medseek/memorization.hpp"
#include "medseek/report.hpp"
#include "medseek/session.hpp"
#include "medseek/stats.hpp"
#include "medseek/text.hpp"
#include "medseek/usermodel.hpp"

struct medseek_session {
  std::unique_ptr<medseek::Session> impl;
};

namespace {

static_assert(static_cast<int>(medseek::ErrorCode::IoError) + 1 == MEDSEEK_E_IO_ERROR,
              "status codes must mirror ErrorCode");

thread_local std::string g_last_error;

medseek_status status_of(medseek::ErrorCode code) {
  // ErrorCode and medseek_status share their order, offset by MEDSEEK_OK.
  return static_cast<medseek_status>(static_cast<int>(code) + 1);
}

medseek_status fail(medseek_status st, std::string msg) {
  g_last_error = std::move(msg);
  return st;
}

template <class F>
medseek_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return MEDSEEK_OK;
  } catch (const medseek::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MEDSEEK_E_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(MEDSEEK_E_IO_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(MEDSEEK_E_INTERNAL, e.what());
  } catch (...) {
    return fail(MEDSEEK_E_INTERNAL, "unknown failure");
  }
}

void put(char** out, const std::string& s) {
  if (!out) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "output pointer is NULL");
  auto* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
  *out = buf;
}

std::string need(const char* s, const char* what) {
  if (!s) throw medseek::Error(medseek::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  return s;
}

medseek::Session& session_of(medseek_session* s) {
  if (!s || !s->impl) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "session is NULL");
  return *s->impl;
}

std::vector<medseek::Engine> engines_of(medseek::Session& s, const char* list) {
  if (!list || !*list) {
    auto all = s.configured_engines();
    if (all.empty()) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "no engines configured");
    return all;
  }
  std::vector<medseek::Engine> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!medseek::text::trim(item).empty()) out.push_back(medseek::engine_from_string(medseek::text::trim(item)));
  return out;
}

std::vector<medseek::Topic> topics_of(medseek::Session& s, const char* path, int year = 0) {
  std::optional<std::filesystem::path> p;
  if (path && *path) p = path;
  std::optional<int> y;
  if (year) y = year;
  return s.topics(p, y);
}

template <class Rows>
std::string jsonl(const Rows& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += medseek::to_json(r).dump();
    out += '\n';
  }
  return out;
}

medseek::BinaryStance stance_of(const char* s) {
  auto v = medseek::text::to_lower(need(s, "stance"));
  if (v == "yes") return medseek::BinaryStance::Yes;
  if (v == "no") return medseek::BinaryStance::No;
  throw medseek::Error(medseek::ErrorCode::UnknownStance, "stance must be yes or no");
}

std::vector<medseek::EntryJudgement> judgements_of(const int* j, size_t n) {
  if (n && !j) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "judgements are NULL");
  std::vector<medseek::EntryJudgement> out;
  for (size_t i = 0; i < n; ++i) {
    if (j[i] < 0 || j[i] > 2) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "judgement must be 0, 1 or 2");
    out.push_back(static_cast<medseek::EntryJudgement>(j[i]));
  }
  return out;
}

void put_outcome(const medseek::InspectionOutcome& o, int* decision, int* effort) {
  if (!decision || !effort) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "output pointer is NULL");
  *decision = static_cast<int>(o.decision);
  *effort = o.effort;
}

medseek::Topic topic_of(const char* query, const char* question, const char* stance) {
  medseek::Topic t;
  t.query = need(query, "query");
  t.question = need(question, "question");
  t.stance = stance_of(stance);
  return t;
}

}  // namespace

extern "C" {

const char* medseek_last_error(void) { return g_last_error.c_str(); }

const char* medseek_status_name(medseek_status status) {
  if (status == MEDSEEK_OK) return "Ok";
  if (status == MEDSEEK_E_INTERNAL) return "Internal";
  if (status > MEDSEEK_OK && status < MEDSEEK_E_INTERNAL)
    return medseek::to_string(static_cast<medseek::ErrorCode>(status - 1)).data();
  return "Unknown";
}

void medseek_string_free(char* s) { std::free(s); }

medseek_status medseek_session_open(const medseek_session_options* options, medseek_session** out) {
  return guarded([&] {
    if (!out) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "output pointer is NULL");
    medseek::SessionOptions o;
    if (options) {
      if (options->config) o.config = options->config;
      if (options->store) o.store = options->store;
      o.offline = options->offline != 0;
      if (options->budget >= 0) o.budget = static_cast<size_t>(options->budget);
    }
    auto s = std::make_unique<medseek_session>();
    s->impl = std::make_unique<medseek::Session>(std::move(o));
    *out = s.release();
  });
}

void medseek_session_close(medseek_session* session) { delete session; }

size_t medseek_session_provider_calls(const medseek_session* session) {
  return session && session->impl ? session->impl->provider_calls() : 0;
}

medseek_status medseek_topics_validate(medseek_session* s, const char* topics, int year, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto ts = topics_of(ses, topics, year);
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& t : ts) ids.push_back(t.id);
    put(out, nlohmann::json{{"count", ts.size()}, {"year", ts.empty() ? 0 : ts.front().year}, {"ids", ids}}.dump() +
                 "\n");
  });
}

medseek_status medseek_serp_fetch(medseek_session* s, const char* engines, const char* topics, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto serps = ses.fetch_serps(engines_of(ses, engines), topics_of(ses, topics));
    std::string body;
    for (const auto& serp : serps) {
      auto j = medseek::to_json(serp);
      j.erase("retrieved_at");
      body += j.dump() + "\n";
    }
    put(out, body);
  });
}

medseek_status medseek_pages_fetch(medseek_session* s, const char* engines, const char* topics, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto pages = ses.fetch_pages(engines_of(ses, engines), topics_of(ses, topics));
    std::ostringstream os;
    os << "url,status,words\n";
    for (const auto& p : pages)
      os << p.url << ',' << medseek::to_string(p.status) << ',' << medseek::text::split_words(p.text).size() << '\n';
    put(out, os.str());
  });
}

medseek_status medseek_passages_rank(medseek_session* s, const char* engine, int topic_id, const char* topics,
                                     char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto ts = topics_of(ses, topics);
    const auto* topic = medseek::find_topic(ts, topic_id);
    if (!topic) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "unknown topic " + std::to_string(topic_id));
    std::string body;
    for (const auto& e : ses.rank_passages(medseek::engine_from_string(need(engine, "engine")), *topic)) {
      nlohmann::json j = {{"rank", e.rank}, {"url", e.url}, {"page_status", medseek::to_string(e.page_status)}};
      if (e.top) {
        j["passage_index"] = e.top->passage.index;
        j["score"] = e.top->score;
        j["scorer"] = e.top->scorer_id;
        j["text"] = e.top->passage.text;
      }
      body += j.dump() + "\n";
    }
    put(out, body);
  });
}

medseek_status medseek_se_answers(medseek_session* s, const char* engines, const char* topics, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    put(out, jsonl(ses.se_answers(engines_of(ses, engines), topics_of(ses, topics))));
  });
}

medseek_status medseek_se_curve(medseek_session* s, const char* mode, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto m = medseek::CurveMode::PerEntry;
    if (mode && std::string(mode) == "per_topic")
      m = medseek::CurveMode::PerTopic;
    else if (mode && std::string(mode) != "per_entry")
      throw medseek::Error(medseek::ErrorCode::InvalidArgument, "curve mode must be per_entry or per_topic");
    put(out, medseek::curve_csv(medseek::se_curves(medseek::load_store_view(ses.store()).se, m)));
  });
}

medseek_status medseek_se_score(medseek_session* s, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    put(out, medseek::se_summary_csv(medseek::se_summary(medseek::load_store_view(ses.store()).se)));
  });
}

medseek_status medseek_se_usersim(medseek_session* s, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    put(out, medseek::usersim_csv(medseek::user_simulation(medseek::load_store_view(ses.store()).se)));
  });
}

medseek_status medseek_llm_run(medseek_session* s, const char* plan, const char* topics, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto p = ses.load_plan(need(plan, "plan"));
    put(out, jsonl(ses.llm_run(p, topics_of(ses, topics, p.topic_set))));
  });
}

medseek_status medseek_rag_run(medseek_session* s, const char* plan, const char* topics, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto p = ses.load_plan(need(plan, "plan"));
    put(out, jsonl(ses.rag_run(p, topics_of(ses, topics, p.topic_set))));
  });
}

medseek_status medseek_stats_mcnemar(medseek_session* s, const char* system_a, const char* system_b, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto rows = medseek::zero_shot_mcnemar(medseek::load_store_view(ses.store()).llm);
    if (system_a || system_b) {
      const auto a = need(system_a, "system_a");
      const auto b = need(system_b, "system_b");
      std::vector<medseek::McNemarRow> picked;
      for (const auto& r : rows)
        if ((r.system_a == a && r.system_b == b) || (r.system_a == b && r.system_b == a)) picked.push_back(r);
      if (picked.empty())
        throw medseek::Error(medseek::ErrorCode::InvalidArgument, "no stored zero-shot rows for " + a + " and " + b);
      rows = picked;
    }
    put(out, medseek::mcnemar_csv(rows));
  });
}

medseek_status medseek_memcheck_run(medseek_session* s, const char* model, const char* topics, int year,
                                    const char* semantic_endpoint, const char* format, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    const int y = year ? year : ses.topic_year();
    std::optional<std::string> endpoint;
    if (semantic_endpoint && *semantic_endpoint) endpoint = semantic_endpoint;
    auto row = ses.memcheck_run(need(model, "model"), topics_of(ses, topics, y), y, endpoint);
    const std::string f = format ? format : "markdown";
    if (f == "csv")
      put(out, medseek::render_memorization_csv({row}));
    else if (f == "markdown" || f == "md")
      put(out, medseek::render_memorization_markdown({row}));
    else
      throw medseek::Error(medseek::ErrorCode::UnknownFormat, "memcheck format must be markdown or csv");
  });
}

medseek_status medseek_errors_export(medseek_session* s, const char* kind, const char* topics, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    put(out, ses.export_errors(medseek::prompt_kind_from_string(need(kind, "kind")), topics_of(ses, topics)));
  });
}

medseek_status medseek_errors_tally(const char* annotations, char** out) {
  return guarded([&] {
    auto parsed = medseek::parse_annotations(medseek::text::read_file(need(annotations, "annotations")));
    auto tally = medseek::tally_error_categories(parsed);
    std::ostringstream os;
    os << "kind,category,percent\n";
    for (const auto& [kind, shares] : tally)
      for (size_t i = 0; i < shares.size(); ++i)
        os << medseek::to_string(kind) << ',' << medseek::to_string(static_cast<medseek::ErrorCategory>(i)) << ','
           << std::fixed << std::setprecision(2) << shares[i] << '\n';
    put(out, os.str());
  });
}

medseek_status medseek_report_emit(medseek_session* s, const char* format, const char* out_dir, char** out) {
  return guarded([&] {
    auto& ses = session_of(s);
    auto files = medseek::emit_report(ses.store(), medseek::report_format_from_string(need(format, "format")),
                                      need(out_dir, "out_dir"));
    std::string body;
    for (const auto& f : files) body += f.string() + "\n";
    put(out, body);
  });
}

double medseek_levenshtein_similarity(const char* a, const char* b) {
  return medseek::levenshtein_similarity(a ? a : "", b ? b : "");
}

double medseek_rouge_l(const char* candidate, const char* reference) {
  return medseek::rouge_l(candidate ? candidate : "", reference ? reference : "");
}

medseek_status medseek_mcnemar_p(int b, int c, double* p) {
  return guarded([&] {
    if (!p) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "output pointer is NULL");
    *p = medseek::mcnemar_exact_p(b, c);
  });
}

medseek_status medseek_wilcoxon(const double* diffs, size_t n, double* w, double* p) {
  return guarded([&] {
    if (!w || !p || (n && !diffs)) throw medseek::Error(medseek::ErrorCode::InvalidArgument, "NULL argument");
    auto r = medseek::wilcoxon_signed_rank(std::span<const double>(diffs, n));
    *w = r.w;
    *p = r.p_value;
  });
}

medseek_status medseek_lazy_user(const int* judgements, size_t n, int* decision, int* effort) {
  return guarded([&] {
    auto j = judgements_of(judgements, n);
    put_outcome(medseek::lazy_user(std::span<const medseek::EntryJudgement>(j)), decision, effort);
  });
}

medseek_status medseek_diligent_user(const int* judgements, size_t n, int* decision, int* effort) {
  return guarded([&] {
    auto j = judgements_of(judgements, n);
    put_outcome(medseek::diligent_user(std::span<const medseek::EntryJudgement>(j)), decision, effort);
  });
}

medseek_status medseek_build_qa_prompt(const char* question, const char* kind, char** out) {
  return guarded([&] {
    put(out, medseek::build_qa_prompt(need(question, "question"), medseek::prompt_kind_from_string(need(kind, "kind"))));
  });
}

medseek_status medseek_build_fewshot_prompt(const char* question, const char* kind, int k, char** out) {
  return guarded([&] {
    const auto& all = medseek::default_demo_pairs();
    if (k < 0 || k > static_cast<int>(all.size()))
      throw medseek::Error(medseek::ErrorCode::InvalidArgument, "k must be within [0, 3]");
    std::vector<medseek::DemoPair> demos(all.begin(), all.begin() + k);
    put(out, medseek::build_fewshot_prompt(need(question, "question"),
                                           medseek::prompt_kind_from_string(need(kind, "kind")), demos));
  });
}

medseek_status medseek_build_rc_prompt(const char* passage, const char* question, char** out) {
  return guarded([&] { put(out, medseek::build_rc_prompt(need(passage, "passage"), need(question, "question"))); });
}

medseek_status medseek_build_rag_prompt(const char* question, const char* evidence, const char* kind, char** out) {
  return guarded([&] {
    put(out, medseek::build_rag_prompt(need(question, "question"), need(evidence, "evidence"),
                                       medseek::prompt_kind_from_string(need(kind, "kind"))));
  });
}

medseek_status medseek_build_general_prompt(const char* query, const char* question, const char* stance, char** out) {
  return guarded([&] { put(out, medseek::build_general_prompt(topic_of(query, question, stance))); });
}

medseek_status medseek_build_guided_prompt(const char* query, const char* question, const char* stance, int year,
                                           char** out) {
  return guarded([&] { put(out, medseek::build_guided_prompt(topic_of(query, question, stance), year)); });
}

}  // extern "C"

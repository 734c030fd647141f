#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "medseek/medseek.h"

namespace {

struct Globals {
  std::string config;
  std::string store;
  bool offline = false;
  long long budget = -1;
  bool stats = false;
  std::string output;
};

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int report_failure(medseek_status st) {
  std::cerr << "error: " << medseek_status_name(st) << ": " << medseek_last_error() << '\n';
  return static_cast<int>(st);
}

int emit(medseek_status st, char* body, const Globals& g) {
  if (st != MEDSEEK_OK) return report_failure(st);
  if (!g.output.empty()) {
    std::ofstream f(g.output, std::ios::binary);
    f << body;
    if (!f) {
      medseek_string_free(body);
      std::cerr << "error: cannot write " << g.output << '\n';
      return static_cast<int>(MEDSEEK_E_IO_ERROR);
    }
  } else {
    std::fputs(body, stdout);
  }
  medseek_string_free(body);
  return 0;
}

// Opens a session from the global flags, runs `verb`, and writes its body.
int with_session(const Globals& g, const std::function<medseek_status(medseek_session*, char**)>& verb) {
  medseek_session_options o{opt(g.config), opt(g.store), g.offline ? 1 : 0, g.budget};
  medseek_session* s = nullptr;
  if (auto st = medseek_session_open(&o, &s); st != MEDSEEK_OK) return report_failure(st);
  char* body = nullptr;
  auto st = verb(s, &body);
  if (g.stats) std::cerr << "provider calls: " << medseek_session_provider_calls(s) << '\n';
  medseek_session_close(s);
  return emit(st, body, g);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate how search engines and LLMs answer binary health questions"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--store", g.store, "Run store directory");
  app.add_flag("--offline", g.offline, "Forbid network calls; cache misses are errors");
  app.add_option("--budget", g.budget, "Cap on live LLM calls");
  app.add_flag("--stats", g.stats, "Print the number of provider calls to stderr");
  app.add_option("-o,--output", g.output, "Write the result to a file instead of stdout");

  std::function<int()> action;
  std::string topics;
  std::string engines;
  int year = 0;

  auto* t = app.add_subcommand("topics", "Topic files")->require_subcommand(1);
  auto* tv = t->add_subcommand("validate", "Parse a topic file and list its ids");
  tv->add_option("--topics", topics, "Topic file (default: configured)");
  tv->add_option("--year", year, "Topic set year");
  tv->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_topics_validate(s, opt(topics), year, out); }); };
  });

  auto* serp = app.add_subcommand("serp", "Search engine result pages")->require_subcommand(1);
  auto* sf = serp->add_subcommand("fetch", "Fetch and cache SERPs");
  sf->add_option("--engines", engines, "Comma-separated engines (default: configured)");
  sf->add_option("--topics", topics, "Topic file");
  sf->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_serp_fetch(s, opt(engines), opt(topics), out); }); };
  });

  auto* pages = app.add_subcommand("pages", "Result pages")->require_subcommand(1);
  auto* pf = pages->add_subcommand("fetch", "Fetch and cache the pages behind stored SERPs");
  pf->add_option("--engines", engines, "Comma-separated engines");
  pf->add_option("--topics", topics, "Topic file");
  pf->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_pages_fetch(s, opt(engines), opt(topics), out); }); };
  });

  std::string engine;
  int topic_id = 0;
  auto* passages = app.add_subcommand("passages", "Passage ranking")->require_subcommand(1);
  auto* pr = passages->add_subcommand("rank", "Best passage per result for one topic");
  pr->add_option("--engine", engine, "Engine")->required();
  pr->add_option("--topic", topic_id, "Topic id")->required();
  pr->add_option("--topics", topics, "Topic file");
  pr->callback([&] {
    action = [&] {
      return with_session(g, [&](auto* s, char** out) { return medseek_passages_rank(s, engine.c_str(), topic_id, opt(topics), out); });
    };
  });

  std::string mode = "per_entry";
  auto* se = app.add_subcommand("se", "Search engine evaluation")->require_subcommand(1);
  auto* sa = se->add_subcommand("answers", "Label every result with the reader model");
  sa->add_option("--engines", engines, "Comma-separated engines");
  sa->add_option("--topics", topics, "Topic file");
  sa->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_se_answers(s, opt(engines), opt(topics), out); }); };
  });
  auto* sc = se->add_subcommand("curve", "Cumulative correct answers by rank (CSV)");
  sc->add_option("--mode", mode, "per_entry or per_topic");
  sc->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_se_curve(s, mode.c_str(), out); }); };
  });
  se->add_subcommand("score", "Answering score per engine (CSV)")->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_se_score(s, out); }); };
  });
  se->add_subcommand("usersim", "Lazy and diligent user outcomes (CSV)")->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_se_usersim(s, out); }); };
  });

  std::string plan;
  auto* llm = app.add_subcommand("llm", "LLM question answering")->require_subcommand(1);
  auto* lr = llm->add_subcommand("run", "Run the zero- and few-shot grid of a plan");
  lr->add_option("--plan", plan, "Plan file")->required();
  lr->add_option("--topics", topics, "Topic file");
  lr->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_llm_run(s, plan.c_str(), opt(topics), out); }); };
  });

  std::string serps;
  auto* rag = app.add_subcommand("rag", "Retrieval-augmented answering")->require_subcommand(1);
  auto* rr = rag->add_subcommand("run", "Run the RAG grid of a plan");
  rr->add_option("--plan", plan, "Plan file")->required();
  rr->add_option("--serps", serps, "Store holding the SERPs (defaults to --store)");
  rr->add_option("--topics", topics, "Topic file");
  rr->callback([&] {
    if (!serps.empty()) g.store = serps;
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_rag_run(s, plan.c_str(), opt(topics), out); }); };
  });

  std::string sys_a;
  std::string sys_b;
  auto* stats = app.add_subcommand("stats", "Significance tests")->require_subcommand(1);
  auto* mc = stats->add_subcommand("mcnemar", "Exact McNemar tests between zero-shot systems (model/kind)");
  mc->add_option("--a", sys_a, "First system");
  mc->add_option("--b", sys_b, "Second system");
  mc->callback([&] {
    action = [&] {
      return with_session(g, [&](auto* s, char** out) { return medseek_stats_mcnemar(s, opt(sys_a), opt(sys_b), out); });
    };
  });

  std::string model;
  std::string semantic;
  std::string format = "markdown";
  auto* mem = app.add_subcommand("memcheck", "Benchmark memorization probe")->require_subcommand(1);
  auto* mr = mem->add_subcommand("run", "Compare guided and general narrative completions");
  mr->add_option("--model", model, "Configured model name")->required();
  mr->add_option("--topics", topics, "Topic file");
  mr->add_option("--year", year, "Topic set year");
  mr->add_option("--semantic-endpoint", semantic, "Semantic similarity scorer URL");
  mr->add_option("--format", format, "markdown or csv");
  mr->callback([&] {
    action = [&] {
      return with_session(g, [&](auto* s, char** out) {
        return medseek_memcheck_run(s, model.c_str(), opt(topics), year, opt(semantic), format.c_str(), out);
      });
    };
  });

  std::string kind = "no_context";
  std::string annotations;
  auto* errors = app.add_subcommand("errors", "Error taxonomy workflow")->require_subcommand(1);
  auto* ee = errors->add_subcommand("export", "Annotation template for topics every model got wrong");
  ee->add_option("--kind", kind, "Prompt kind");
  ee->add_option("--topics", topics, "Topic file");
  ee->callback([&] {
    action = [&] { return with_session(g, [&](auto* s, char** out) { return medseek_errors_export(s, kind.c_str(), opt(topics), out); }); };
  });
  auto* et = errors->add_subcommand("tally", "Category percentages per prompt kind (CSV)");
  et->add_option("--annotations", annotations, "Filled annotation file")->required();
  et->callback([&] {
    action = [&] {
      char* body = nullptr;
      auto st = medseek_errors_tally(annotations.c_str(), &body);
      return emit(st, body, g);
    };
  });

  std::string out_dir;
  auto* report = app.add_subcommand("report", "Reports")->require_subcommand(1);
  auto* re = report->add_subcommand("emit", "Render reports from the store");
  re->add_option("--format", format, "csv, svg or markdown")->required();
  re->add_option("--out", out_dir, "Output directory")->required();
  re->callback([&] {
    action = [&] {
      return with_session(g, [&](auto* s, char** out) { return medseek_report_emit(s, format.c_str(), out_dir.c_str(), out); });
    };
  });

  CLI11_PARSE(app, argc, argv);
  return action ? action() : 0;
}

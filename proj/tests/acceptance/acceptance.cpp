// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is the number of failures. Reference values come from oracles written here,
// independently of the library code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "medseek/medseek.h"
#include "medseek/metrics.hpp"
#include "medseek/usermodel.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace medseek;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = fail(std::string("exception: ") + e.what());
  }
  if (!o.ok) ++failures;
  std::printf("%s %s%s%s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.empty() ? "" : " : ", o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string take(char* s) {
  std::string out = s ? s : "";
  medseek_string_free(s);
  return out;
}

// ---- user behaviour oracle: line-by-line rendering of the pseudo-code ----

enum { kCorrect = 0, kIncorrect = 1, kUnanswered = 2 };
enum { kRespCorrect = 0, kRespIncorrect = 1, kRespNone = 2 };

std::pair<int, int> lazy_oracle(const std::vector<int>& s) {
  int effort = 0;
  for (int entry : s) {
    effort = effort + 1;
    if (entry != kUnanswered) {
      if (entry == kCorrect) return {kRespCorrect, effort};
      return {kRespIncorrect, effort};
    }
  }
  return {kRespNone, effort};
}

std::pair<int, int> diligent_oracle(const std::vector<int>& s) {
  int effort = 0;
  int correct_responses = 0;
  int incorrect_responses = 0;
  for (int entry : s) {
    effort = effort + 1;
    if (entry != kUnanswered) {
      if (entry == kCorrect)
        correct_responses = correct_responses + 1;
      else
        incorrect_responses = incorrect_responses + 1;
    }
    if (correct_responses + incorrect_responses == 3) {
      if (correct_responses >= 2) return {kRespCorrect, effort};
      return {kRespIncorrect, effort};
    }
  }
  if (correct_responses != 0 && correct_responses <= 2 && incorrect_responses == 0) return {kRespCorrect, effort};
  if (incorrect_responses != 0 && incorrect_responses <= 2 && correct_responses == 0) return {kRespIncorrect, effort};
  return {kRespNone, effort};
}

std::vector<EntryJudgement> to_judgements(const std::vector<int>& s) {
  std::vector<EntryJudgement> out;
  for (int v : s)
    out.push_back(v == kCorrect ? EntryJudgement::Correct
                                : v == kIncorrect ? EntryJudgement::Incorrect : EntryJudgement::Unanswered);
  return out;
}

int decision_code(Decision d) {
  switch (d) {
    case Decision::CorrectResponse: return kRespCorrect;
    case Decision::IncorrectResponse: return kRespIncorrect;
    case Decision::NoAnswer: return kRespNone;
  }
  return -1;
}

// Every label sequence of length 0..8.
std::vector<std::vector<int>> all_sequences() {
  std::vector<std::vector<int>> out;
  for (int len = 0; len <= 8; ++len) {
    int total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      std::vector<int> s(static_cast<size_t>(len));
      int c = code;
      for (int i = 0; i < len; ++i) {
        s[static_cast<size_t>(i)] = c % 3;
        c /= 3;
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

// ---- statistics oracles ----

double binomial_oracle_p(int b, int c) {
  const int n = b + c;
  if (n == 0) return 1.0;
  const int k = std::max(b, c);
  // Exact integer tail count over 2^n outcomes.
  uint64_t tail = 0;
  uint64_t choose = 1;  // C(n, i) built incrementally
  for (int i = 0; i <= n; ++i) {
    if (i > 0) choose = choose * static_cast<uint64_t>(n - i + 1) / static_cast<uint64_t>(i);
    if (i >= k) tail += choose;
  }
  const double p = 2.0 * static_cast<double>(tail) / std::ldexp(1.0, n);
  return std::min(1.0, p);
}

// One-sided P(W+ >= observed) by enumerating all sign assignments.
double wilcoxon_oracle_p(const std::vector<double>& diffs) {
  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0) nz.push_back(d);
  const size_t n = nz.size();
  if (n == 0) return 1.0;
  // Doubled average ranks so every comparison is on integers.
  std::vector<long> rank2(n);
  for (size_t i = 0; i < n; ++i) {
    long less = 0;
    long equal = 0;
    for (size_t j = 0; j < n; ++j) {
      if (std::fabs(nz[j]) < std::fabs(nz[i])) ++less;
      if (std::fabs(nz[j]) == std::fabs(nz[i])) ++equal;
    }
    rank2[i] = 2 * less + equal + 1;
  }
  long observed = 0;
  for (size_t i = 0; i < n; ++i)
    if (nz[i] > 0) observed += rank2[i];
  uint64_t hits = 0;
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
    long w = 0;
    for (size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += rank2[i];
    if (w >= observed) ++hits;
  }
  return static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n));
}

// ---- similarity oracles ----

size_t lcs_bruteforce(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  size_t best = 0;
  for (uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    size_t len = static_cast<size_t>(__builtin_popcount(mask));
    if (len <= best) continue;
    size_t j = 0;
    bool ok = true;
    for (size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = len;
  }
  return best;
}

double rouge_oracle(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty() || ref.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_bruteforce(cand, ref));
  if (lcs == 0) return 0.0;
  const double p = lcs / static_cast<double>(cand.size());
  const double r = lcs / static_cast<double>(ref.size());
  return 2 * p * r / (p + r);
}

std::vector<std::u32string> kAlphabet{U"a", U"b", U"c", U"é", U"中"};

std::string utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

double levenshtein_oracle(const std::u32string& a, const std::u32string& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return 1.0 - static_cast<double>(d[a.size()][b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

// ---- end-to-end replay ----

struct ReplayRun {
  std::map<std::string, std::string> bodies;  // verb -> output body
  std::map<std::string, std::string> reports;  // file name -> content
  size_t provider_calls = 0;
};

ReplayRun replay_once(const fs::path& fixtures, const fs::path& store, const fs::path& out_dir) {
  const auto config = (fixtures / "config.json").string();
  const auto store_s = store.string();
  medseek_session_options o{config.c_str(), store_s.c_str(), 1, -1};
  medseek_session* s = nullptr;
  if (medseek_session_open(&o, &s) != MEDSEEK_OK) throw std::runtime_error(medseek_last_error());
  ReplayRun run;
  auto call = [&](const std::string& verb, medseek_status st, char* body) {
    if (st != MEDSEEK_OK) {
      std::string msg = verb + ": " + medseek_status_name(st) + ": " + medseek_last_error();
      medseek_session_close(s);
      throw std::runtime_error(msg);
    }
    run.bodies[verb] = take(body);
  };
  char* b = nullptr;
  const auto plan_llm = (fixtures / "plan_llm.json").string();
  const auto plan_rag = (fixtures / "plan_rag.json").string();
  auto st = medseek_se_answers(s, nullptr, nullptr, &b);
  call("se answers", st, b);
  st = medseek_se_curve(s, "per_entry", &b);
  call("se curve", st, b);
  st = medseek_se_usersim(s, &b);
  call("se usersim", st, b);
  st = medseek_llm_run(s, plan_llm.c_str(), nullptr, &b);
  call("llm run", st, b);
  st = medseek_rag_run(s, plan_rag.c_str(), nullptr, &b);
  call("rag run", st, b);
  st = medseek_memcheck_run(s, "model-a", nullptr, 0, nullptr, "markdown", &b);
  call("memcheck run", st, b);
  for (const char* fmt : {"csv", "svg", "markdown"}) {
    st = medseek_report_emit(s, fmt, out_dir.string().c_str(), &b);
    call(std::string("report ") + fmt, st, b);
  }
  run.provider_calls = medseek_session_provider_calls(s);
  medseek_session_close(s);
  for (const auto& entry : fs::directory_iterator(out_dir)) run.reports[entry.path().filename().string()] = slurp(entry.path());
  // The list of written files names the output directory; compare names only.
  run.bodies.erase("report csv");
  run.bodies.erase("report svg");
  run.bodies.erase("report markdown");
  return run;
}

}  // namespace

int main() {
  const fs::path fixtures = fs::path(MEDSEEK_FIXTURES) / "replay";
  const fs::path golden = MEDSEEK_GOLDEN;

  criterion("user-model oracle equivalence (all label sequences up to length 8, < 5 s)", [] {
    auto t0 = std::chrono::steady_clock::now();
    auto seqs = all_sequences();
    size_t checked = 0;
    for (const auto& s : seqs) {
      auto j = to_judgements(s);
      auto lazy = lazy_user(std::span<const EntryJudgement>(j));
      auto dil = diligent_user(std::span<const EntryJudgement>(j));
      auto lo = lazy_oracle(s);
      auto dil_o = diligent_oracle(s);
      if (decision_code(lazy.decision) != lo.first || lazy.effort != lo.second)
        return fail("lazy mismatch on a sequence of length " + std::to_string(s.size()));
      if (decision_code(dil.decision) != dil_o.first || dil.effort != dil_o.second)
        return fail("diligent mismatch on a sequence of length " + std::to_string(s.size()));
      // Same through the C ABI.
      std::vector<int> codes(s.begin(), s.end());
      int dec = -1, eff = -1;
      if (medseek_lazy_user(codes.data(), codes.size(), &dec, &eff) != MEDSEEK_OK || dec != lo.first ||
          eff != lo.second)
        return fail("C API lazy mismatch");
      if (medseek_diligent_user(codes.data(), codes.size(), &dec, &eff) != MEDSEEK_OK || dec != dil_o.first ||
          eff != dil_o.second)
        return fail("C API diligent mismatch");
      ++checked;
    }
    double secs = seconds_since(t0);
    if (secs >= 5.0) return fail("took " + std::to_string(secs) + " s");
    return Outcome{true, std::to_string(checked) + " sequences, " + std::to_string(secs) + " s"};
  });

  criterion("effort dominance (diligent >= lazy; lazy = first answered index)", [] {
    for (const auto& s : all_sequences()) {
      auto j = to_judgements(s);
      auto lazy = lazy_user(std::span<const EntryJudgement>(j));
      auto dil = diligent_user(std::span<const EntryJudgement>(j));
      if (dil.effort < lazy.effort) return fail("diligent effort below lazy effort");
      auto first = std::find_if(s.begin(), s.end(), [](int v) { return v != kUnanswered; });
      int expected = first == s.end() ? static_cast<int>(s.size()) : static_cast<int>(first - s.begin()) + 1;
      if (lazy.effort != expected) return fail("lazy effort is not the first answered position");
    }
    return Outcome{};
  });

  criterion("diligent tie rule ([correct, incorrect, 18 x no answer] -> no answer)", [] {
    std::vector<EntryJudgement> s{EntryJudgement::Correct, EntryJudgement::Incorrect};
    s.resize(20, EntryJudgement::Unanswered);
    auto out = diligent_user(std::span<const EntryJudgement>(s));
    if (out.decision != Decision::NoAnswer) return fail("decision was " + std::string(to_string(out.decision)));
    if (out.effort != 20) return fail("effort " + std::to_string(out.effort));
    return Outcome{};
  });

  criterion("McNemar exactness (all b + c <= 30 within 1e-12)", [] {
    for (int n = 0; n <= 30; ++n) {
      for (int b = 0; b <= n; ++b) {
        double p = 0;
        if (medseek_mcnemar_p(b, n - b, &p) != MEDSEEK_OK) return fail("status error");
        if (std::fabs(p - binomial_oracle_p(b, n - b)) > 1e-12)
          return fail("b=" + std::to_string(b) + " c=" + std::to_string(n - b));
      }
    }
    double p = 0;
    medseek_mcnemar_p(10, 0, &p);
    if (std::fabs(p - 0.001953125) > 1e-12) return fail("b=10,c=0 gave " + std::to_string(p));
    medseek_mcnemar_p(5, 5, &p);
    if (p != 1.0) return fail("b=c gave " + std::to_string(p));
    return Outcome{};
  });

  criterion("Wilcoxon exactness (200 random vectors, n <= 10, vs sign enumeration)", [] {
    std::mt19937 rng(20240601);
    for (int round = 0; round < 200; ++round) {
      size_t n = 1 + rng() % 10;
      std::vector<double> d(n);
      // Small integer grid so ties and zeros occur.
      for (auto& v : d) v = static_cast<double>(static_cast<int>(rng() % 9) - 3) * 0.25;
      double w = 0, p = 0;
      if (medseek_wilcoxon(d.data(), d.size(), &w, &p) != MEDSEEK_OK) return fail("status error");
      if (std::fabs(p - wilcoxon_oracle_p(d)) > 1e-12) return fail("mismatch in round " + std::to_string(round));
    }
    double six[] = {0.1, 0.25, 0.3, 0.45, 0.5, 0.6};
    double w = 0, p = 0;
    medseek_wilcoxon(six, 6, &w, &p);
    if (p != 1.0 / 64) return fail("six positive diffs gave " + std::to_string(p));
    return Outcome{};
  });

  criterion("ROUGE-L vs brute-force LCS (1000 cases) and Levenshtein vs DP (1000 cases)", [] {
    std::mt19937 rng(99);
    const std::vector<std::string> vocab{"the", "cat", "sat", "on", "mat", "dog"};
    for (int round = 0; round < 1000; ++round) {
      std::vector<std::string> a(rng() % 13), b(rng() % 13);
      for (auto& t : a) t = vocab[rng() % vocab.size()];
      for (auto& t : b) t = vocab[rng() % vocab.size()];
      std::string sa, sb;
      for (const auto& t : a) sa += t + " ";
      for (const auto& t : b) sb += t + " ";
      if (medseek_rouge_l(sa.c_str(), sb.c_str()) != rouge_oracle(a, b))
        return fail("ROUGE-L mismatch: '" + sa + "' vs '" + sb + "'");
    }
    for (int round = 0; round < 1000; ++round) {
      std::u32string a, b;
      for (size_t i = 0, n = rng() % 9; i < n; ++i) a += kAlphabet[rng() % kAlphabet.size()];
      for (size_t i = 0, n = rng() % 9; i < n; ++i) b += kAlphabet[rng() % kAlphabet.size()];
      if (medseek_levenshtein_similarity(utf8(a).c_str(), utf8(b).c_str()) != levenshtein_oracle(a, b))
        return fail("Levenshtein mismatch: '" + utf8(a) + "' vs '" + utf8(b) + "'");
    }
    return Outcome{};
  });

  criterion("metric sanity (500 random record sets plus hand-computed fixtures)", [] {
    std::mt19937 rng(5);
    auto record = [](int topic, int rank, AnswerLabel label, bool correct) {
      AnswerRecord r;
      r.topic_id = topic;
      r.rank = rank;
      r.label = label;
      r.correct = correct && label != AnswerLabel::NoAnswer;
      return r;
    };
    for (int round = 0; round < 500; ++round) {
      int topics = 1 + static_cast<int>(rng() % 6);
      int depth = 1 + static_cast<int>(rng() % 10);
      std::vector<AnswerRecord> recs;
      for (int t = 0; t < topics; ++t)
        for (int r = 1; r <= depth; ++r)
          if (rng() % 5) {
            auto label = static_cast<AnswerLabel>(rng() % 3);
            recs.push_back(record(t, r, label, rng() % 2));
          }
      if (recs.empty()) continue;
      for (auto mode : {CurveMode::PerEntry, CurveMode::PerTopic})
        for (const auto& [pos, v] : cumulative_correct_curve(recs, depth, mode).points)
          if (v < 0 || v > 1) return fail("curve point out of [0, 1]");
      double score = answering_score(recs, depth);
      if (score < 0 || score > topics) return fail("answering score out of range");
      // Turning an unanswered record into an answer never lowers the score.
      for (auto& r : recs) {
        if (r.label != AnswerLabel::NoAnswer) continue;
        r.label = AnswerLabel::Yes;
        if (answering_score(recs, depth) < score) return fail("answering score not monotone");
        break;
      }
    }
    std::vector<AnswerRecord> rank1{record(1, 1, AnswerLabel::Yes, true), record(2, 1, AnswerLabel::Yes, false)};
    if (cumulative_correct_curve(rank1, 1).points[0].second != 0.5) return fail("rank-1 fixture");
    std::vector<AnswerRecord> two{record(1, 1, AnswerLabel::Yes, true), record(1, 2, AnswerLabel::NoAnswer, false),
                                  record(2, 1, AnswerLabel::No, false), record(2, 2, AnswerLabel::Yes, true)};
    auto curve = cumulative_correct_curve(two, 2);
    if (curve.points[0].second != 0.5 || curve.points[1].second != 0.5) return fail("2-topic fixture");
    if (answering_score(two, 2) != 1.5) return fail("answering-score fixture");
    std::vector<AnswerRecord> silent{record(1, 1, AnswerLabel::NoAnswer, false), record(1, 2, AnswerLabel::NoAnswer, false)};
    for (const auto& [pos, v] : cumulative_correct_curve(silent, 2).points)
      if (v != 0) return fail("all-unanswered curve not zero");
    if (answering_score(silent, 2) != 0) return fail("all-unanswered score not zero");
    return Outcome{};
  });

  criterion("prompt fidelity (byte-equal golden prompts)", [&] {
    const std::string q = "Can Vitamin D cure COVID-19?";
    const std::string passage = "Vitamin D supplements have not been shown to cure COVID-19";
    std::vector<std::pair<std::string, std::function<medseek_status(char**)>>> cases{
        {"qa_no_context.txt", [&](char** o) { return medseek_build_qa_prompt(q.c_str(), "no_context", o); }},
        {"qa_non_expert.txt", [&](char** o) { return medseek_build_qa_prompt(q.c_str(), "non_expert", o); }},
        {"qa_expert.txt", [&](char** o) { return medseek_build_qa_prompt(q.c_str(), "expert", o); }},
        {"fewshot_no_context.txt", [&](char** o) { return medseek_build_fewshot_prompt(q.c_str(), "no_context", 3, o); }},
        {"fewshot_expert.txt", [&](char** o) { return medseek_build_fewshot_prompt(q.c_str(), "expert", 3, o); }},
        {"rc.txt", [&](char** o) { return medseek_build_rc_prompt(passage.c_str(), q.c_str(), o); }},
        {"rag_no_context.txt", [&](char** o) { return medseek_build_rag_prompt(q.c_str(), passage.c_str(), "no_context", o); }},
        {"rag_expert.txt", [&](char** o) { return medseek_build_rag_prompt(q.c_str(), passage.c_str(), "expert", o); }},
        {"general.txt", [&](char** o) { return medseek_build_general_prompt("vitamin d covid", q.c_str(), "no", o); }},
        {"guided_2021.txt",
         [&](char** o) { return medseek_build_guided_prompt("vitamin d covid", q.c_str(), "no", 2021, o); }},
    };
    for (auto& [file, build] : cases) {
      char* out = nullptr;
      if (build(&out) != MEDSEEK_OK) return fail(file + ": " + medseek_last_error());
      if (take(out) != slurp(golden / file)) return fail(file + " differs");
    }
    return Outcome{true, std::to_string(cases.size()) + " prompts"};
  });

  criterion("end-to-end offline replay (< 60 s, identical output, zero calls on rerun)", [&] {
    TempDir work;
    auto t0 = std::chrono::steady_clock::now();
    auto first = replay_once(fixtures, work / "store", work / "report1");
    auto second = replay_once(fixtures, work / "store", work / "report2");
    double secs = seconds_since(t0);
    if (secs >= 60) return fail("took " + std::to_string(secs) + " s");
    if (second.provider_calls != 0) return fail(std::to_string(second.provider_calls) + " provider calls on rerun");
    if (first.provider_calls == 0) return fail("first run made no provider calls");
    for (const auto& [verb, body] : first.bodies)
      if (second.bodies[verb] != body) return fail(verb + " output differs between runs");
    if (first.reports != second.reports) return fail("report files differ between runs");
    if (first.reports.size() != 9) return fail(std::to_string(first.reports.size()) + " report files");
    return Outcome{true, std::to_string(first.provider_calls) + " calls then 0, " + std::to_string(secs) + " s"};
  });

  criterion("grid cardinality (2 models x 3 kinds x 4 shot counts x 5 topics = 120 rows)", [&] {
    TempDir work;
    const auto config = (fixtures / "config.json").string();
    const auto store = (work / "store").string();
    const auto plan = (fixtures / "plan_llm.json").string();
    medseek_session_options o{config.c_str(), store.c_str(), 1, -1};
    medseek_session* s = nullptr;
    if (medseek_session_open(&o, &s) != MEDSEEK_OK) return fail(medseek_last_error());
    char* out = nullptr;
    auto st = medseek_llm_run(s, plan.c_str(), nullptr, &out);
    medseek_session_close(s);
    if (st != MEDSEEK_OK) return fail(medseek_last_error());
    std::istringstream in(take(out));
    std::string line;
    size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      if (!j.contains("correct") || !j["correct"].is_boolean()) return fail("row without a correctness bit");
      ++rows;
    }
    if (rows != 120) return fail(std::to_string(rows) + " rows");
    return Outcome{};
  });

  std::printf("%d failure(s)\n", failures);
  return failures;
}

#include "medseek/memorization.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "medseek/error.hpp"
#include "medseek/parallel.hpp"
#include "medseek/stats.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

void append_fields(std::string& out, const Topic& topic) {
  out += "Query: ";
  out += topic.query;
  out += ", Question: ";
  out += topic.question;
  out += ", Answer: ";
  out += to_string(topic.stance);
  out += ", Narrative:";
}

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

constexpr std::string_view kFooter =
    "Guided-vs-general similarity is a high-precision, low-recall contamination signal: a star suggests "
    "exposure to the topic set, its absence does not rule it out.";

}  // namespace

std::string build_general_prompt(const Topic& topic) {
  std::string out =
      "Complete the narrative field based on the query, question and answer fields such that the narrative "
      "provides an explanation for the answer to the given question. ";
  append_fields(out, topic);
  return out;
}

std::string build_guided_prompt(const Topic& topic, int year) {
  if (year < 2020 || year > 2022) throw Error(ErrorCode::InvalidArgument, "guided prompt year must be 2020-2022");
  std::string out = "You are provided with the query, question and answer fields of a topic from the TREC ";
  out += std::to_string(year);
  out +=
      " Health Misinformation topic set. Complete the narrative field of the topic as exactly appeared in the "
      "dataset. Only rely in the original form of the topic in the dataset to complete the narrative field. ";
  append_fields(out, topic);
  return out;
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  auto x = text::decode_utf8(a);
  auto y = text::decode_utf8(b);
  if (x.empty() && y.empty()) return 1.0;
  std::vector<size_t> prev(y.size() + 1);
  std::vector<size_t> cur(y.size() + 1);
  for (size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= y.size(); ++j) {
      const size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  const auto longest = static_cast<double>(std::max(x.size(), y.size()));
  return 1.0 - static_cast<double>(prev[y.size()]) / longest;
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  auto c = text::tokenize(candidate);
  auto r = text::tokenize(reference);
  if (c.empty() && r.empty()) return 1.0;
  if (c.empty() || r.empty()) return 0.0;
  std::vector<size_t> prev(r.size() + 1, 0);
  std::vector<size_t> cur(r.size() + 1, 0);
  for (size_t i = 1; i <= c.size(); ++i) {
    for (size_t j = 1; j <= r.size(); ++j)
      cur[j] = c[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  const auto lcs = static_cast<double>(prev[r.size()]);
  if (lcs == 0) return 0.0;
  const double p = lcs / static_cast<double>(c.size());
  const double rec = lcs / static_cast<double>(r.size());
  return 2 * p * rec / (p + rec);
}

SimilarityTriple similarity(const std::string& candidate, const std::string& reference, PassageScorer* semantic) {
  SimilarityTriple t;
  t.levenshtein = levenshtein_similarity(candidate, reference);
  t.rouge_l = rouge_l(candidate, reference);
  if (semantic) {
    auto scores = semantic->score(reference, {candidate});
    if (scores.size() != 1 || !std::isfinite(scores[0]) || scores[0] < 0 || scores[0] > 1)
      throw Error(ErrorCode::ScorerUnavailable, "semantic scorer returned a value outside [0, 1]");
    t.semantic = scores[0];
  }
  return t;
}

ContaminationReport contamination_report(std::span<const CompletionPair> pairs, PassageScorer* semantic) {
  if (pairs.size() < 2) throw Error(ErrorCode::TooFewPairs, "contamination report needs at least two pairs");
  for (const auto& p : pairs)
    if (text::trim(p.reference).empty())
      throw Error(ErrorCode::InvalidArgument, "topic " + std::to_string(p.topic_id) + " has no reference narrative");

  std::vector<SimilarityTriple> general;
  std::vector<SimilarityTriple> guided;
  for (const auto& p : pairs) {
    general.push_back(similarity(p.general_text, p.reference, semantic));
    guided.push_back(similarity(p.guided_text, p.reference, semantic));
  }

  auto compare = [&](std::string name, auto get) {
    MetricComparison m;
    m.metric = std::move(name);
    std::vector<double> diffs;
    for (size_t i = 0; i < pairs.size(); ++i) {
      const double g = get(general[i]);
      const double s = get(guided[i]);
      m.mean_general += g;
      m.mean_guided += s;
      diffs.push_back(s - g);
    }
    m.mean_general /= static_cast<double>(pairs.size());
    m.mean_guided /= static_cast<double>(pairs.size());
    m.p_value = wilcoxon_signed_rank(diffs).p_value;
    m.flagged = m.mean_guided > m.mean_general && m.p_value < 0.05;
    return m;
  };

  ContaminationReport report;
  report.pairs = pairs.size();
  report.metrics.push_back(compare("levenshtein", [](const SimilarityTriple& t) { return t.levenshtein; }));
  if (semantic)
    report.metrics.push_back(compare("bleurt", [](const SimilarityTriple& t) { return *t.semantic; }));
  report.metrics.push_back(compare("rouge_l", [](const SimilarityTriple& t) { return t.rouge_l; }));
  return report;
}

std::vector<CompletionPair> gather_completion_pairs(const std::vector<Topic>& topics, int year,
                                                    const ModelSpec& model, LlmGateway& gateway,
                                                    size_t max_in_flight) {
  ModelSpec uncapped = model;
  uncapped.max_output_tokens = 0;
  std::vector<const Topic*> usable;
  for (const auto& t : topics)
    if (!text::trim(t.narrative).empty()) usable.push_back(&t);
  std::sort(usable.begin(), usable.end(), [](const Topic* a, const Topic* b) { return a->id < b->id; });

  std::vector<CompletionPair> out(usable.size());
  parallel_for(usable.size(), max_in_flight, [&](size_t i) {
    const Topic& t = *usable[i];
    out[i].topic_id = t.id;
    out[i].reference = t.narrative;
    out[i].general_text = gateway.complete(uncapped, build_general_prompt(t)).raw_text;
    out[i].guided_text = gateway.complete(uncapped, build_guided_prompt(t, year)).raw_text;
  });
  return out;
}

std::string render_memorization_markdown(const std::vector<MemorizationRow>& rows) {
  bool with_bleurt = std::any_of(rows.begin(), rows.end(), [](const MemorizationRow& r) {
    return std::any_of(r.report.metrics.begin(), r.report.metrics.end(),
                       [](const MetricComparison& m) { return m.metric == "bleurt"; });
  });
  std::vector<std::string> metrics{"levenshtein"};
  if (with_bleurt) metrics.push_back("bleurt");
  metrics.push_back("rouge_l");

  std::ostringstream os;
  os << "| Model | Version | Levenshtein |" << (with_bleurt ? " BLEURT |" : "") << " ROUGE |\n";
  os << "|---|---|---|" << (with_bleurt ? "---|" : "") << "---|\n";
  for (const auto& row : rows) {
    for (bool guided : {false, true}) {
      os << "| " << row.model_id << " | " << (guided ? "Guided" : "General") << " |";
      for (const auto& name : metrics) {
        auto it = std::find_if(row.report.metrics.begin(), row.report.metrics.end(),
                               [&](const MetricComparison& m) { return m.metric == name; });
        if (it == row.report.metrics.end()) {
          os << " - |";
          continue;
        }
        os << ' ' << fixed2(guided ? it->mean_guided : it->mean_general) << (guided && it->flagged ? "*" : "")
           << " |";
      }
      os << '\n';
    }
  }
  os << "\n* guided similarity significantly higher (one-sided Wilcoxon signed-rank, p < 0.05).\n";
  os << kFooter << '\n';
  return os.str();
}

std::string render_memorization_csv(const std::vector<MemorizationRow>& rows) {
  std::ostringstream os;
  os << "model,metric,pairs,mean_general,mean_guided,p_value,flagged\n";
  for (const auto& row : rows)
    for (const auto& m : row.report.metrics)
      os << row.model_id << ',' << m.metric << ',' << row.report.pairs << ',' << fixed4(m.mean_general) << ','
         << fixed4(m.mean_guided) << ',' << fixed4(m.p_value) << ',' << (m.flagged ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace medseek

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medseek/llm_gateway.hpp"
#include "medseek/passages_rank.hpp"
#include "medseek/topics.hpp"

namespace medseek {

std::string build_general_prompt(const Topic& topic);

// Names the dataset and year; year must be 2020, 2021 or 2022.
std::string build_guided_prompt(const Topic& topic, int year);

// 1 - edit_distance / max(|a|, |b|) over Unicode scalar values; 1.0 for two
// empty strings.
double levenshtein_similarity(std::string_view a, std::string_view b);

// Token-level LCS F1 (tokens as in text::tokenize).
double rouge_l(std::string_view candidate, std::string_view reference);

struct CompletionPair {
  int topic_id = 0;
  std::string general_text;
  std::string guided_text;
  std::string reference;  // the topic's narrative
};

struct SimilarityTriple {
  double levenshtein = 0;
  double rouge_l = 0;
  std::optional<double> semantic;
};

// `semantic` may be null. A semantic score outside [0, 1] is ScorerUnavailable.
SimilarityTriple similarity(const std::string& candidate, const std::string& reference, PassageScorer* semantic);

struct MetricComparison {
  std::string metric;  // "levenshtein", "bleurt", "rouge_l"
  double mean_general = 0;
  double mean_guided = 0;
  double p_value = 1;
  bool flagged = false;
};

struct ContaminationReport {
  size_t pairs = 0;
  std::vector<MetricComparison> metrics;  // levenshtein, [bleurt], rouge_l
};

// One-sided Wilcoxon on per-topic (guided - general) similarity. A metric is
// flagged when the guided mean is higher and p < 0.05. Throws TooFewPairs
// below two pairs and InvalidArgument for an empty reference.
ContaminationReport contamination_report(std::span<const CompletionPair> pairs, PassageScorer* semantic = nullptr);

// Collects the general and guided completions for every topic with a
// narrative. The model's output cap is lifted so narratives are not cut short.
std::vector<CompletionPair> gather_completion_pairs(const std::vector<Topic>& topics, int year,
                                                    const ModelSpec& model, LlmGateway& gateway,
                                                    size_t max_in_flight = 4);

struct MemorizationRow {
  std::string model_id;
  ContaminationReport report;
};

// Markdown table laid out as Model | Version | Levenshtein | BLEURT | ROUGE,
// with a star on guided cells that are flagged. BLEURT is omitted when no
// row carries it.
std::string render_memorization_markdown(const std::vector<MemorizationRow>& rows);
std::string render_memorization_csv(const std::vector<MemorizationRow>& rows);

}  // namespace medseek

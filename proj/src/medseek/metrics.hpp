#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medseek/answer_extraction.hpp"

namespace medseek {

// How the cumulative curve is normalised at position n.
//   PerEntry: correct entries within ranks 1..n over n * #topics.
//   PerTopic: topics with at least one correct entry within ranks 1..n over #topics.
enum class CurveMode { PerEntry, PerTopic };

struct RankCurve {
  std::string engine;
  std::vector<std::pair<int, double>> points;  // (position, proportion)
};

// `records` hold one engine's answers for any number of topics; missing ranks
// count as NoAnswer and ranks beyond depth are ignored. Throws EmptyInput.
RankCurve cumulative_correct_curve(std::span<const AnswerRecord> records, int depth,
                                   CurveMode mode = CurveMode::PerEntry);

// Mean over positions 1..depth of the number of topics answered there.
double answering_score(std::span<const AnswerRecord> records, int depth);

// correct / (correct + incorrect); throws NoAnsweredRecords if nothing answered.
double conditional_correct_rate(std::span<const AnswerRecord> records);

// A missing prediction (unparsable completion) counts as incorrect.
struct PredictionPair {
  std::optional<BinaryStance> predicted;
  BinaryStance truth = BinaryStance::No;
};

double llm_accuracy(std::span<const PredictionPair> answers);

}  // namespace medseek

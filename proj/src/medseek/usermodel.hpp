#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "medseek/answer_extraction.hpp"

namespace medseek {

enum class Decision { CorrectResponse, IncorrectResponse, NoAnswer };

std::string_view to_string(Decision d);

// effort = number of ranked results inspected before deciding.
struct InspectionOutcome {
  Decision decision = Decision::NoAnswer;
  int effort = 0;

  bool operator==(const InspectionOutcome&) const = default;
};

// What a simulated user sees at one rank.
enum class EntryJudgement { Correct, Incorrect, Unanswered };

EntryJudgement judge(const AnswerRecord& r);

// Stops at the first answered entry.
InspectionOutcome lazy_user(std::span<const EntryJudgement> entries);
InspectionOutcome lazy_user(std::span<const AnswerRecord> records);

// Collects three answers and takes the majority. When the list runs out,
// one or two answers that agree decide; a 1-1 split or no answers at all is
// NoAnswer.
InspectionOutcome diligent_user(std::span<const EntryJudgement> entries);
InspectionOutcome diligent_user(std::span<const AnswerRecord> records);

struct OutcomeSummary {
  double pct_correct = 0;
  double pct_incorrect = 0;
  double pct_noanswer = 0;
  double mean_effort = 0;
};

// Throws EmptyInput for an empty list.
OutcomeSummary summarize_outcomes(std::span<const InspectionOutcome> outcomes);

}  // namespace medseek

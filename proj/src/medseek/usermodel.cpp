#include "medseek/usermodel.hpp"

#include "medseek/error.hpp"

namespace medseek {

namespace {

std::vector<EntryJudgement> judgements(std::span<const AnswerRecord> records) {
  std::vector<EntryJudgement> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(judge(r));
  return out;
}

}  // namespace

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::CorrectResponse: return "correct";
    case Decision::IncorrectResponse: return "incorrect";
    case Decision::NoAnswer: return "no_answer";
  }
  return "?";
}

EntryJudgement judge(const AnswerRecord& r) {
  if (r.label == AnswerLabel::NoAnswer) return EntryJudgement::Unanswered;
  return r.correct ? EntryJudgement::Correct : EntryJudgement::Incorrect;
}

InspectionOutcome lazy_user(std::span<const EntryJudgement> entries) {
  int effort = 0;
  for (auto e : entries) {
    ++effort;
    if (e == EntryJudgement::Correct) return {Decision::CorrectResponse, effort};
    if (e == EntryJudgement::Incorrect) return {Decision::IncorrectResponse, effort};
  }
  return {Decision::NoAnswer, effort};
}

InspectionOutcome lazy_user(std::span<const AnswerRecord> records) {
  auto j = judgements(records);
  return lazy_user(std::span<const EntryJudgement>(j));
}

InspectionOutcome diligent_user(std::span<const EntryJudgement> entries) {
  int effort = 0;
  int correct = 0;
  int incorrect = 0;
  for (auto e : entries) {
    ++effort;
    if (e == EntryJudgement::Correct) ++correct;
    if (e == EntryJudgement::Incorrect) ++incorrect;
    if (correct + incorrect == 3)
      return {correct >= 2 ? Decision::CorrectResponse : Decision::IncorrectResponse, effort};
  }
  if (correct > 0 && incorrect == 0) return {Decision::CorrectResponse, effort};
  if (incorrect > 0 && correct == 0) return {Decision::IncorrectResponse, effort};
  return {Decision::NoAnswer, effort};
}

InspectionOutcome diligent_user(std::span<const AnswerRecord> records) {
  auto j = judgements(records);
  return diligent_user(std::span<const EntryJudgement>(j));
}

OutcomeSummary summarize_outcomes(std::span<const InspectionOutcome> outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::EmptyInput, "no outcomes to summarize");
  size_t correct = 0;
  size_t incorrect = 0;
  size_t none = 0;
  double effort = 0;
  for (const auto& o : outcomes) {
    switch (o.decision) {
      case Decision::CorrectResponse: ++correct; break;
      case Decision::IncorrectResponse: ++incorrect; break;
      case Decision::NoAnswer: ++none; break;
    }
    effort += o.effort;
  }
  const auto n = static_cast<double>(outcomes.size());
  return {100.0 * static_cast<double>(correct) / n, 100.0 * static_cast<double>(incorrect) / n,
          100.0 * static_cast<double>(none) / n, effort / n};
}

}  // namespace medseek

#include "medseek/metrics.hpp"

#include <map>

#include "medseek/error.hpp"

namespace medseek {

namespace {

// topic id -> judgement per rank (index 0 = rank 1), padded with NoAnswer.
std::map<int, std::vector<const AnswerRecord*>> by_topic(std::span<const AnswerRecord> records, int depth) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no answer records");
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  std::map<int, std::vector<const AnswerRecord*>> out;
  for (const auto& r : records) {
    auto& slots = out[r.topic_id];
    slots.resize(static_cast<size_t>(depth), nullptr);
    if (r.rank >= 1 && r.rank <= depth) slots[static_cast<size_t>(r.rank - 1)] = &r;
  }
  return out;
}

bool answered(const AnswerRecord* r) { return r && r->label != AnswerLabel::NoAnswer; }
bool correct(const AnswerRecord* r) { return r && r->correct && r->label != AnswerLabel::NoAnswer; }

}  // namespace

RankCurve cumulative_correct_curve(std::span<const AnswerRecord> records, int depth, CurveMode mode) {
  auto topics = by_topic(records, depth);
  RankCurve curve;
  curve.engine = std::string(to_string(records.front().engine));
  const auto n_topics = static_cast<double>(topics.size());

  std::map<int, bool> seen_correct;
  size_t correct_so_far = 0;
  for (int n = 1; n <= depth; ++n) {
    for (const auto& [id, slots] : topics) {
      if (correct(slots[static_cast<size_t>(n - 1)])) {
        ++correct_so_far;
        seen_correct[id] = true;
      }
    }
    double value = 0;
    if (mode == CurveMode::PerEntry)
      value = static_cast<double>(correct_so_far) / (n * n_topics);
    else
      value = static_cast<double>(seen_correct.size()) / n_topics;
    curve.points.emplace_back(n, value);
  }
  return curve;
}

double answering_score(std::span<const AnswerRecord> records, int depth) {
  auto topics = by_topic(records, depth);
  double total = 0;
  for (int p = 0; p < depth; ++p) {
    for (const auto& [id, slots] : topics)
      if (answered(slots[static_cast<size_t>(p)])) total += 1;
  }
  return total / depth;
}

double conditional_correct_rate(std::span<const AnswerRecord> records) {
  size_t right = 0;
  size_t answered_count = 0;
  for (const auto& r : records) {
    if (r.label == AnswerLabel::NoAnswer) continue;
    ++answered_count;
    if (r.correct) ++right;
  }
  if (answered_count == 0) throw Error(ErrorCode::NoAnsweredRecords, "no answered records");
  return static_cast<double>(right) / static_cast<double>(answered_count);
}

double llm_accuracy(std::span<const PredictionPair> answers) {
  if (answers.empty()) throw Error(ErrorCode::EmptyInput, "no answers");
  size_t right = 0;
  for (const auto& a : answers)
    if (a.predicted && *a.predicted == a.truth) ++right;
  return static_cast<double>(right) / static_cast<double>(answers.size());
}

}  // namespace medseek

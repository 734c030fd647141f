#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "medseek/llm_gateway.hpp"
#include "medseek/passages_rank.hpp"
#include "medseek/serp.hpp"
#include "medseek/topics.hpp"

namespace medseek {

enum class AnswerLabel { Yes, No, NoAnswer };

std::string_view to_string(AnswerLabel l);  // "yes" / "no" / "no_answer"
AnswerLabel answer_label_from_string(std::string_view s);

// Reading-comprehension verdict for one ranked entry. correct is false
// whenever label is NoAnswer.
struct AnswerRecord {
  Engine engine = Engine::Google;
  int topic_id = 0;
  int rank = 0;
  AnswerLabel label = AnswerLabel::NoAnswer;
  bool correct = false;
  std::string url;
  int passage_index = -1;  // -1 when no passage was available
  std::string run_id;

  bool operator==(const AnswerRecord&) const = default;
};

nlohmann::json to_json(const AnswerRecord& r);
AnswerRecord answer_record_from_json(const nlohmann::json& j);

bool is_correct(AnswerLabel label, BinaryStance truth);

// "<passage>. Based on the previous text, answer 'yes', 'no' or 'no answer
// provided' to the following question: <question>"; a passage that already
// ends in '.' gets no second period.
std::string build_rc_prompt(const std::string& passage, const std::string& question);

// "no answer" in the first sentence wins over a bare "no"; otherwise the
// binary token scan applies and anything else is NoAnswer.
AnswerLabel map_reader_output(std::string_view raw_text);

AnswerLabel extract_answer(const std::string& passage, const std::string& question, const ModelSpec& reader,
                           LlmGateway& gateway);

struct LabelingSetup {
  LlmGateway& gateway;
  ModelSpec reader;
  PassageScorer& scorer;
  PageFetcher& pages;
  PassageWindow window;
  size_t max_in_flight = 8;
  std::string run_id = "default";
};

// One record per SERP entry in rank order. Pages that fail to fetch or hold
// no text are labelled NoAnswer.
std::vector<AnswerRecord> label_ranking(const Serp& serp, const Topic& topic, LabelingSetup& setup);

}  // namespace medseek

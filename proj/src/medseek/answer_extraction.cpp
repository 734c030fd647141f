#include "medseek/answer_extraction.hpp"

#include "medseek/error.hpp"
#include "medseek/parallel.hpp"
#include "medseek/text.hpp"

namespace medseek {

std::string_view to_string(AnswerLabel l) {
  switch (l) {
    case AnswerLabel::Yes: return "yes";
    case AnswerLabel::No: return "no";
    case AnswerLabel::NoAnswer: return "no_answer";
  }
  return "?";
}

AnswerLabel answer_label_from_string(std::string_view s) {
  if (s == "yes") return AnswerLabel::Yes;
  if (s == "no") return AnswerLabel::No;
  if (s == "no_answer") return AnswerLabel::NoAnswer;
  throw Error(ErrorCode::ParseError, "unknown answer label '" + std::string(s) + "'");
}

nlohmann::json to_json(const AnswerRecord& r) {
  return {{"engine", to_string(r.engine)}, {"topic_id", r.topic_id},
          {"rank", r.rank},                {"label", to_string(r.label)},
          {"correct", r.correct},          {"url", r.url},
          {"passage_index", r.passage_index}, {"run_id", r.run_id}};
}

AnswerRecord answer_record_from_json(const nlohmann::json& j) {
  try {
    AnswerRecord r;
    r.engine = engine_from_string(j.at("engine").get<std::string>());
    r.topic_id = j.at("topic_id").get<int>();
    r.rank = j.at("rank").get<int>();
    r.label = answer_label_from_string(j.at("label").get<std::string>());
    r.correct = j.at("correct").get<bool>();
    r.url = j.value("url", "");
    r.passage_index = j.value("passage_index", -1);
    r.run_id = j.value("run_id", "");
    if (r.correct && r.label == AnswerLabel::NoAnswer)
      throw Error(ErrorCode::ParseError, "answer record marked correct without an answer");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad answer record: ") + e.what());
  }
}

bool is_correct(AnswerLabel label, BinaryStance truth) {
  return (label == AnswerLabel::Yes && truth == BinaryStance::Yes) ||
         (label == AnswerLabel::No && truth == BinaryStance::No);
}

std::string build_rc_prompt(const std::string& passage, const std::string& question) {
  auto body = text::trim(passage);
  if (body.empty()) throw Error(ErrorCode::InvalidArgument, "reading-comprehension prompt needs a passage");
  if (text::trim(question).empty())
    throw Error(ErrorCode::InvalidArgument, "reading-comprehension prompt needs a question");
  if (body.back() != '.') body.push_back('.');
  return body + " Based on the previous text, answer 'yes', 'no' or 'no answer provided' to the following question: " +
         question;
}

AnswerLabel map_reader_output(std::string_view raw_text) {
  auto trimmed = text::trim(raw_text);
  auto end = trimmed.find_first_of(".!?\n");
  auto first_sentence = text::collapse_whitespace(text::to_lower(trimmed.substr(0, end)));
  if (first_sentence.find("no answer") != std::string::npos) return AnswerLabel::NoAnswer;
  if (auto stance = parse_binary_answer(trimmed))
    return *stance == BinaryStance::Yes ? AnswerLabel::Yes : AnswerLabel::No;
  return AnswerLabel::NoAnswer;
}

AnswerLabel extract_answer(const std::string& passage, const std::string& question, const ModelSpec& reader,
                           LlmGateway& gateway) {
  auto completion = gateway.complete(reader, build_rc_prompt(passage, question));
  return map_reader_output(completion.raw_text);
}

std::vector<AnswerRecord> label_ranking(const Serp& serp, const Topic& topic, LabelingSetup& setup) {
  auto evidence = select_evidence(serp, topic.question, setup.pages, setup.scorer, setup.window, setup.max_in_flight);
  std::vector<AnswerRecord> out(evidence.size());
  parallel_for(evidence.size(), setup.max_in_flight, [&](size_t i) {
    const auto& ev = evidence[i];
    auto& rec = out[i];
    rec.engine = serp.engine;
    rec.topic_id = topic.id;
    rec.rank = ev.rank;
    rec.url = ev.url;
    rec.run_id = setup.run_id;
    if (!ev.top) {
      rec.label = AnswerLabel::NoAnswer;
      return;
    }
    rec.passage_index = ev.top->passage.index;
    rec.label = extract_answer(ev.top->passage.text, topic.question, setup.reader, setup.gateway);
    rec.correct = is_correct(rec.label, topic.stance);
  });
  return out;
}

}  // namespace medseek

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medseek {

enum class BinaryStance { Yes, No };

std::string_view to_string(BinaryStance s);  // "yes" / "no"

// TREC HM topic. Immutable after parsing.
struct Topic {
  int id = 0;
  std::string query;
  std::string question;  // the topic's description field, whitespace-collapsed
  BinaryStance stance = BinaryStance::No;
  std::string narrative;
  int year = 0;
  // Unrecognised child elements (disclaimer, evidence, ...) in file order.
  std::vector<std::pair<std::string, std::string>> extras;

  bool operator==(const Topic&) const = default;
};

// Maps file tag names onto canonical field names (number, query, description,
// narrative, stance) and raw stance strings onto helpful/unhelpful. Tag names
// not listed map to themselves.
struct TopicSchema {
  std::map<std::string, std::string> tag_aliases;
  std::map<std::string, std::string> stance_aliases;
};

// "helpful" -> Yes, "unhelpful" -> No (after trimming and lowercasing).
// Throws UnknownStance otherwise.
BinaryStance stance_to_label(std::string_view raw);

std::vector<Topic> parse_topics(std::string_view source, int year, const TopicSchema& schema = {});
std::vector<Topic> parse_topics_json(std::string_view source, int year, const TopicSchema& schema = {});

// Chooses the JSON mirror format for `.json` files.
std::vector<Topic> load_topics(const std::filesystem::path& path, int year,
                               const TopicSchema& schema = {});

// Inverse of parse_topics for the canonical tag set.
std::string serialize_topics(const std::vector<Topic>& topics);

const Topic* find_topic(const std::vector<Topic>& topics, int id);

}  // namespace medseek

#include "medseek/topics.hpp"

#include <charconv>
#include <memory>
#include <set>

#include <json.hpp>

#include "medseek/error.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

struct Element {
  std::string name;
  std::string text;
  std::vector<std::unique_ptr<Element>> children;
};

// Minimal reader for the XML subset used by TREC topic files: declarations,
// comments, CDATA, attributes (ignored) and the five named entities plus
// numeric character references.
class MarkupReader {
 public:
  explicit MarkupReader(std::string_view src) : src_(src) {}

  std::vector<std::unique_ptr<Element>> read_document() {
    std::vector<std::unique_ptr<Element>> roots;
    for (;;) {
      skip_misc();
      if (pos_ >= src_.size()) break;
      if (src_[pos_] != '<') fail("text outside of any element");
      roots.push_back(read_element());
    }
    if (roots.empty()) fail("no elements");
    return roots;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::MalformedTopicFile,
                "malformed topic file at byte " + std::to_string(pos_) + ": " + why);
  }

  bool at(std::string_view lit) const { return src_.substr(pos_, lit.size()) == lit; }

  void skip_until(std::string_view terminator) {
    auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail("unterminated construct");
    pos_ = end + terminator.size();
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  void skip_misc() {
    for (;;) {
      skip_space();
      if (at("<?")) {
        skip_until("?>");
      } else if (at("<!--")) {
        skip_until("-->");
      } else if (at("<!")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  std::string read_name() {
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' || c == '.')
        ++pos_;
      else
        break;
    }
    if (pos_ == start) fail("expected a tag name");
    return std::string(src_.substr(start, pos_ - start));
  }

  std::unique_ptr<Element> read_element() {
    ++pos_;  // '<'
    auto el = std::make_unique<Element>();
    el->name = read_name();
    // Attributes are not used by the topic format; skip them, honouring quotes.
    while (pos_ < src_.size() && src_[pos_] != '>' && !at("/>")) {
      char c = src_[pos_];
      if (c == '"' || c == '\'') {
        auto end = src_.find(c, pos_ + 1);
        if (end == std::string_view::npos) fail("unterminated attribute");
        pos_ = end + 1;
      } else {
        ++pos_;
      }
    }
    if (pos_ >= src_.size()) fail("unterminated start tag <" + el->name + ">");
    if (at("/>")) {
      pos_ += 2;
      return el;
    }
    ++pos_;  // '>'
    for (;;) {
      if (pos_ >= src_.size()) fail("missing </" + el->name + ">");
      if (at("</")) {
        pos_ += 2;
        auto closing = read_name();
        if (closing != el->name) fail("mismatched </" + closing + "> for <" + el->name + ">");
        skip_space();
        if (pos_ >= src_.size() || src_[pos_] != '>') fail("bad end tag");
        ++pos_;
        return el;
      }
      if (at("<!--")) {
        skip_until("-->");
      } else if (at("<![CDATA[")) {
        pos_ += 9;
        auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA");
        el->text.append(src_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (src_[pos_] == '<') {
        el->children.push_back(read_element());
      } else {
        auto next = src_.find('<', pos_);
        if (next == std::string_view::npos) next = src_.size();
        el->text += decode_entities(src_.substr(pos_, next - pos_));
        pos_ = next;
      }
    }
  }

  std::string decode_entities(std::string_view raw) const {
    std::string out;
    size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity");
      auto name = raw.substr(i + 1, semi - i - 1);
      if (name == "amp") out += '&';
      else if (name == "lt") out += '<';
      else if (name == "gt") out += '>';
      else if (name == "quot") out += '"';
      else if (name == "apos") out += '\'';
      else if (!name.empty() && name[0] == '#') {
        unsigned long cp = 0;
        auto digits = name.substr(1);
        int base = 10;
        if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
          digits = digits.substr(1);
          base = 16;
        }
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
        if (ec != std::errc{} || p != digits.data() + digits.size()) fail("bad character reference");
        text::append_utf8(out, static_cast<char32_t>(cp));
      } else {
        fail("unknown entity &" + std::string(name) + ";");
      }
      i = semi + 1;
    }
    return out;
  }

  std::string_view src_;
  size_t pos_ = 0;
};

void collect_topics(Element& el, std::vector<Element*>& out) {
  if (el.name == "topic") {
    out.push_back(&el);
    return;
  }
  for (auto& child : el.children) collect_topics(*child, out);
}

std::string canonical_tag(const std::string& tag, const TopicSchema& schema) {
  auto it = schema.tag_aliases.find(tag);
  return it == schema.tag_aliases.end() ? tag : it->second;
}

// Raw field values keyed by canonical name, plus extras in order.
struct RawTopic {
  std::map<std::string, std::string> fields;
  std::vector<std::pair<std::string, std::string>> extras;
};

bool is_core_field(const std::string& name) {
  return name == "number" || name == "query" || name == "description" || name == "narrative" ||
         name == "stance";
}

Topic build_topic(const RawTopic& raw, int year, const TopicSchema& schema, size_t ordinal) {
  auto require = [&](const char* name) -> const std::string& {
    auto it = raw.fields.find(name);
    if (it == raw.fields.end() || text::trim(it->second).empty())
      throw Error(ErrorCode::MissingField,
                  "topic #" + std::to_string(ordinal + 1) + " lacks <" + name + ">");
    return it->second;
  };
  auto optional = [&](const char* name) {
    auto it = raw.fields.find(name);
    return it == raw.fields.end() ? std::string{} : text::trim(it->second);
  };

  Topic t;
  t.year = year;
  auto number = text::trim(require("number"));
  auto [p, ec] = std::from_chars(number.data(), number.data() + number.size(), t.id);
  if (ec != std::errc{} || p != number.data() + number.size())
    throw Error(ErrorCode::MalformedTopicFile, "topic number is not an integer: " + number);

  t.question = text::collapse_whitespace(require("description"));
  if (t.question.back() != '?')
    throw Error(ErrorCode::InvalidTopic,
                "topic " + std::to_string(t.id) + ": question does not end with '?'");

  auto stance = text::to_lower(text::trim(require("stance")));
  if (auto it = schema.stance_aliases.find(stance); it != schema.stance_aliases.end())
    stance = it->second;
  t.stance = stance_to_label(stance);
  t.query = optional("query");
  t.narrative = optional("narrative");
  t.extras = raw.extras;
  return t;
}

void check_unique(const std::vector<Topic>& topics) {
  std::set<std::pair<int, int>> seen;
  for (const auto& t : topics) {
    if (!seen.emplace(t.year, t.id).second)
      throw Error(ErrorCode::DuplicateTopicId, "duplicate topic id " + std::to_string(t.id));
  }
}

std::string escape_markup(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(BinaryStance s) {
  return s == BinaryStance::Yes ? "yes" : "no";
}

BinaryStance stance_to_label(std::string_view raw) {
  auto v = text::to_lower(text::trim(raw));
  if (v == "helpful") return BinaryStance::Yes;
  if (v == "unhelpful") return BinaryStance::No;
  throw Error(ErrorCode::UnknownStance, "unknown stance '" + std::string(raw) + "'");
}

std::vector<Topic> parse_topics(std::string_view source, int year, const TopicSchema& schema) {
  if (text::trim(source).empty()) throw Error(ErrorCode::MalformedTopicFile, "empty topic file");
  MarkupReader reader(source);
  auto roots = reader.read_document();
  std::vector<Element*> topic_elements;
  for (auto& root : roots) collect_topics(*root, topic_elements);
  if (topic_elements.empty()) throw Error(ErrorCode::MalformedTopicFile, "no <topic> elements");

  std::vector<Topic> topics;
  topics.reserve(topic_elements.size());
  for (size_t i = 0; i < topic_elements.size(); ++i) {
    RawTopic raw;
    for (auto& child : topic_elements[i]->children) {
      if (!child->children.empty())
        throw Error(ErrorCode::MalformedTopicFile, "nested markup inside <" + child->name + ">");
      auto name = canonical_tag(child->name, schema);
      if (is_core_field(name))
        raw.fields[name] = child->text;
      else
        raw.extras.emplace_back(child->name, text::trim(child->text));
    }
    topics.push_back(build_topic(raw, year, schema, i));
  }
  check_unique(topics);
  return topics;
}

std::vector<Topic> parse_topics_json(std::string_view source, int year, const TopicSchema& schema) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedTopicFile, std::string("topic JSON: ") + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw Error(ErrorCode::MalformedTopicFile, "topic JSON must be a non-empty array");

  std::vector<Topic> topics;
  for (size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    if (!obj.is_object()) throw Error(ErrorCode::MalformedTopicFile, "topic entry is not an object");
    RawTopic raw;
    for (const auto& [key, value] : obj.items()) {
      auto str = value.is_string() ? value.get<std::string>() : value.dump();
      auto name = canonical_tag(key, schema);
      if (is_core_field(name))
        raw.fields[name] = str;
      else
        raw.extras.emplace_back(key, text::trim(str));
    }
    topics.push_back(build_topic(raw, year, schema, i));
  }
  check_unique(topics);
  return topics;
}

std::vector<Topic> load_topics(const std::filesystem::path& path, int year, const TopicSchema& schema) {
  auto source = text::read_file(path);
  if (path.extension() == ".json") return parse_topics_json(source, year, schema);
  return parse_topics(source, year, schema);
}

std::string serialize_topics(const std::vector<Topic>& topics) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<topics>\n";
  auto field = [&out](std::string_view tag, std::string_view value) {
    out += "    <";
    out += tag;
    out += '>';
    out += escape_markup(value);
    out += "</";
    out += tag;
    out += ">\n";
  };
  for (const auto& t : topics) {
    out += "  <topic>\n";
    field("number", std::to_string(t.id));
    field("query", t.query);
    field("description", t.question);
    field("narrative", t.narrative);
    field("stance", t.stance == BinaryStance::Yes ? "helpful" : "unhelpful");
    for (const auto& [k, v] : t.extras) field(k, v);
    out += "  </topic>\n";
  }
  out += "</topics>\n";
  return out;
}

const Topic* find_topic(const std::vector<Topic>& topics, int id) {
  for (const auto& t : topics)
    if (t.id == id) return &t;
  return nullptr;
}

}  // namespace medseek

#include "medseek/html.hpp"

#include <cctype>
#include <charconv>
#include <unordered_map>

#include "medseek/text.hpp"

namespace medseek::html {

namespace {

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table{
      {"amp", U'&'},     {"lt", U'<'},      {"gt", U'>'},      {"quot", U'"'},
      {"apos", U'\''},   {"nbsp", U' '},    {"ndash", U'\u2013'},   {"mdash", U'\u2014'},
      {"hellip", U'…'},  {"lsquo", U'‘'},   {"rsquo", U'’'},   {"ldquo", U'“'},
      {"rdquo", U'”'},   {"copy", U'©'},    {"reg", U'®'},     {"trade", U'™'},
      {"deg", U'°'},     {"middot", U'·'},  {"bull", U'•'},    {"laquo", U'«'},
      {"raquo", U'»'},   {"eacute", U'é'},  {"aacute", U'á'},  {"iacute", U'í'},
      {"oacute", U'ó'},  {"uacute", U'ú'},  {"ntilde", U'ñ'},  {"uuml", U'ü'},
      {"ouml", U'ö'},    {"auml", U'ä'},    {"szlig", U'ß'},   {"times", U'×'},
      {"micro", U'µ'},   {"plusmn", U'±'},  {"frac12", U'½'},  {"shy", 0x00AD},
  };
  return table;
}

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    auto name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      auto digits = name.substr(1);
      int base = 10;
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        digits = digits.substr(1);
        base = 16;
      }
      unsigned long cp = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
      if (ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty()) {
        text::append_utf8(out, cp == 0 ? U'�' : static_cast<char32_t>(cp));
        i = semi + 1;
        continue;
      }
    } else if (auto it = named_entities().find(name); it != named_entities().end()) {
      if (it->second != 0x00AD) text::append_utf8(out, it->second);
      i = semi + 1;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string inner_text(std::string_view fragment) {
  static constexpr std::string_view inline_tags[] = {"b", "i", "em", "strong", "span", "a", "u", "small"};
  std::string raw;
  size_t i = 0;
  while (i < fragment.size()) {
    if (fragment[i] == '<') {
      auto close = fragment.find('>', i);
      if (close == std::string_view::npos) break;
      auto tag = fragment.substr(i + 1, close - i - 1);
      if (!tag.empty() && tag[0] == '/') tag.remove_prefix(1);
      auto name_end = tag.find_first_of(" \t\n\r/");
      auto name = text::to_lower(tag.substr(0, name_end));
      bool is_inline = false;
      for (auto t : inline_tags) is_inline = is_inline || name == t;
      if (!is_inline) raw.push_back(' ');
      i = close + 1;
      continue;
    }
    raw.push_back(fragment[i++]);
  }
  return text::collapse_whitespace(decode_entities(raw));
}

std::string attribute(std::string_view tag, std::string_view name) {
  size_t pos = 0;
  while (pos < tag.size()) {
    auto hit = tag.find(name, pos);
    if (hit == std::string_view::npos) return {};
    bool left_ok = hit > 0 && std::isspace(static_cast<unsigned char>(tag[hit - 1]));
    size_t k = hit + name.size();
    while (k < tag.size() && std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
    if (!left_ok || k >= tag.size() || tag[k] != '=') {
      pos = hit + name.size();
      continue;
    }
    ++k;
    while (k < tag.size() && std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
    if (k >= tag.size()) return {};
    char quote = tag[k];
    if (quote == '"' || quote == '\'') {
      auto end = tag.find(quote, k + 1);
      if (end == std::string_view::npos) return {};
      return decode_entities(tag.substr(k + 1, end - k - 1));
    }
    auto end = k;
    while (end < tag.size() && !std::isspace(static_cast<unsigned char>(tag[end])) && tag[end] != '>')
      ++end;
    return decode_entities(tag.substr(k, end - k));
  }
  return {};
}

}  // namespace medseek::html

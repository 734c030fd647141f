#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by every module.
namespace medseek::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Replaces every run of whitespace (including newlines) with one space and trims.
std::string collapse_whitespace(std::string_view s);

// Lowercased tokens split on anything that is not an ASCII letter or digit.
// Bytes >= 0x80 count as word characters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view s);

// Whitespace-delimited words, original case.
std::vector<std::string> split_words(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Lossy UTF-8 decode; invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

// UTC wall clock, ISO-8601 with seconds.
std::string now_iso8601();

}  // namespace medseek::text

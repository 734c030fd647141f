#pragma once

#include <string>
#include <string_view>

// Low-level HTML helpers used by the page extractor and the SERP scrapers.
namespace medseek::html {

// Decodes named (common subset), decimal and hex character references.
// Unknown references are left verbatim.
std::string decode_entities(std::string_view s);

// Drops all tags from a fragment, decodes entities, collapses whitespace.
std::string inner_text(std::string_view fragment);

// Value of attribute `name` inside a start tag (`<a href="..." ...>`), decoded.
std::string attribute(std::string_view tag, std::string_view name);

}  // namespace medseek::html

#pragma once

#include <string>
#include <string_view>

namespace teaming::text {

// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD so that
// dirty input never aborts a load.
std::u32string decode_utf8(std::string_view in);
std::string encode_utf8(std::u32string_view in);

// Simple (1:1) lowercase mapping for Latin, Greek, Cyrillic and Armenian
// blocks. Other scripts have no case and pass through unchanged.
char32_t to_lower(char32_t cp);

// True for code points that belong inside a word: letters, digits, marks.
// Everything else (ASCII punctuation, symbols, whitespace, general
// punctuation blocks) acts as a separator.
bool is_word_char(char32_t cp);

}  // namespace teaming::text

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace scriptgap::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

/// One decoded code point together with the bytes it came from. Invalid
/// UTF-8 bytes decode one at a time to U+FFFD so that the original byte
/// string can always be reassembled from `offset`/`length`.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

std::vector<CodePoint> decode(std::string_view utf8);
std::u32string to_u32(std::string_view utf8);
void append_utf8(std::string& out, char32_t cp);
std::string to_utf8(std::u32string_view text);

bool is_whitespace(char32_t cp);
/// Punctuation and symbols: ASCII non-alphanumerics plus the Latin-1,
/// General Punctuation, CJK punctuation and fullwidth punctuation blocks.
bool is_punctuation(char32_t cp);
bool is_digit(char32_t cp);

/// Simple case mapping for Latin (Basic, Latin-1, Extended-A), Greek and
/// Cyrillic. Other code points map to themselves.
char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
inline bool is_cased(char32_t cp) { return is_upper(cp) || is_lower(cp); }

std::string to_lower(std::string_view utf8);

bool is_ascii(std::string_view s);

}  // namespace scriptgap::unicode

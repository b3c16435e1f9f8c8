#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace scidsi::unicode {

inline constexpr char32_t kInvalid = 0xFFFFFFFF;

bool valid_utf8(std::string_view text);

/// Canonical composition (NFC). Throws ParseError on malformed UTF-8.
std::string nfc(std::string_view text);

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Returns kInvalid (and advances one byte) on a malformed sequence.
char32_t next_code_point(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

// Character classes follow the conventions of BERT's basic tokenizer.
bool is_whitespace(char32_t cp);
bool is_control(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_cjk(char32_t cp);

bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_alpha(char32_t cp);
bool is_digit(char32_t cp);

/// Full-string lowercase (locale-independent root casing).
std::string to_lower(std::string_view text);

}  // namespace scidsi::unicode

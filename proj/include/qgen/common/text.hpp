#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qgen::text {

// Byte offset of the first malformed UTF-8 sequence, or nullopt if valid.
// Rejects overlong forms, surrogates and code points above U+10FFFF.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Decodes valid UTF-8. Behaviour on invalid input is unspecified.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Walks one code point starting at pos; returns it and advances pos.
char32_t next_codepoint(std::string_view utf8, std::size_t& pos);

std::string nfc(std::string_view utf8);
std::string fold_case(std::string_view utf8);

bool is_alnum(char32_t cp);
bool is_upper(char32_t cp);
bool is_digit(char32_t cp);
bool is_punct(char32_t cp);
bool is_space(char32_t cp);
bool is_control(char32_t cp);

std::vector<std::string> split_whitespace(std::string_view s);
std::string trim(std::string_view s);
std::size_t word_count(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Case-fold, trim, collapse internal whitespace, strip trailing punctuation.
// Used to compare MCQ options and to grade free-text answers.
std::string normalize_option(std::string_view s);

// Case-fold, trim and collapse internal whitespace only.
std::string normalize_answer(std::string_view s);

// Current UTC time as RFC 3339 with millisecond precision.
std::string utc_now_rfc3339();

}  // namespace qgen::text

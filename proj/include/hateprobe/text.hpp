#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hateprobe::text {

// ASCII lowercasing; bytes >= 0x80 pass through untouched so UTF-8 stays valid.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on runs of ASCII whitespace. Empty pieces are never produced.
std::vector<std::string> split_whitespace(std::string_view s);

// Lowercase + whitespace split. This is the tokenization shared by the
// dataset substitution rules and both explanation metrics.
std::vector<std::string> tokenize(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_word_char(char c);

// Byte offset of the given code point index in a UTF-8 string. Indices past
// the end map to s.size().
std::size_t utf8_byte_offset(std::string_view s, std::size_t codepoint_index);

std::size_t utf8_length(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

}  // namespace hateprobe::text

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace halodet {

// UTF-8 helpers. All public offsets in this library are code-point offsets;
// these are the only functions that touch bytes.

std::u32string decode_utf8(std::string_view text);  // throws ParseError on invalid UTF-8
std::string encode_utf8(std::u32string_view text);

std::size_t cp_length(std::string_view text);

// Substring by code-point range, returned as UTF-8.
std::string cp_substr(std::string_view text, std::size_t cp_start, std::size_t cp_end);

// byte_to_cp[b] = number of code points strictly before byte offset b.
// Size is text.size() + 1. Throws ParseError if b falls inside a code point
// when queried via cp_offset_at_byte.
std::vector<std::size_t> byte_to_cp_map(std::string_view text);
std::size_t cp_offset_at_byte(std::string_view text, std::size_t byte_offset);

bool is_whitespace(char32_t cp);

}  // namespace halodet

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iof::text {

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view cps);

/// Unicode NFC normalization.
std::string nfc(std::string_view utf8);

/// Case folding for phrase matching on Turkish text. İ, I, ı and i all fold to
/// 'i' so that dotted/dotless variants compare equal; every other code point
/// gets full Unicode case folding. Input is NFC-normalized first.
std::string fold_turkish(std::string_view utf8);

/// ASCII-only lowercase; non-ASCII bytes pass through.
std::string ascii_lower(std::string_view s);

std::string_view trim(std::string_view s);

/// Maximal runs of non-whitespace (ASCII whitespace).
std::vector<std::string_view> split_whitespace(std::string_view s);

bool is_word_byte(char c);  // [A-Za-z0-9_]

/// True for code points that act as letters/digits for phrase boundaries.
bool is_word_codepoint(char32_t cp);

}  // namespace iof::text

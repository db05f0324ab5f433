#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freetalky::text {

// Splits on whitespace and emits every ASCII punctuation character as its own
// token. Apostrophes (ASCII and U+2019) inside a word stay part of it, and
// any non-ASCII byte counts as a word character.
std::vector<std::string> tokenize(std::string_view text, bool lowercase);

// Joins tokens with single spaces, except that closing punctuation attaches
// to the preceding token.
std::string detokenize(std::span<const std::string> tokens);

bool is_punctuation_token(std::string_view token);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Lowercases, drops punctuation and collapses whitespace to single spaces.
std::string normalize_words(std::string_view text);

// Whitespace tokens of normalize_words(text).
std::vector<std::string> normalized_tokens(std::string_view text);

}  // namespace freetalky::text

#include "freetalky/text/tokenizer.hpp"

#include <cctype>

namespace freetalky::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) != 0;
}

bool starts_with_right_quote(std::string_view s, std::size_t i) {
  return s.compare(i, 3, "\xE2\x80\x99") == 0;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool is_punctuation_token(std::string_view token) { return token.size() == 1 && is_ascii_punct(token[0]); }

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(lowercase ? to_lower(word) : word);
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_space(c)) {
      flush();
    } else if (c == '\'' && !word.empty() && i + 1 < text.size() && std::isalpha(static_cast<unsigned char>(text[i + 1]))) {
      word.push_back(c);
    } else if (is_ascii_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else if (starts_with_right_quote(text, i)) {
      word.append(text.substr(i, 3));
      i += 2;
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    const bool attach = t.size() == 1 && (t[0] == '.' || t[0] == ',' || t[0] == '?' || t[0] == '!' || t[0] == ';' || t[0] == ':');
    if (!out.empty() && !attach) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string normalize_words(std::string_view text) {
  std::string out;
  for (const auto& tok : tokenize(text, true)) {
    if (is_punctuation_token(tok)) continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(text, true))
    if (!is_punctuation_token(tok)) out.push_back(std::move(tok));
  return out;
}

}  // namespace freetalky::text

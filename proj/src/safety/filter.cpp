#include "freetalky/safety/filter.hpp"

#include "freetalky/text/tokenizer.hpp"

#include <fstream>

namespace freetalky::safety {

std::string normalize(std::string_view text) { return text::normalize_words(text); }

bool contains_offensive(std::string_view text, const OffensiveLexicon& lexicon) {
  for (const auto& tok : text::normalized_tokens(text))
    if (lexicon.words.count(tok)) return true;
  return false;
}

OffensiveLexicon OffensiveLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SafetyError("cannot open lexicon: " + path.string());
  OffensiveLexicon lex;
  lex.source_path = path;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string word = normalize(line);
    if (word.empty()) continue;
    if (word.find(' ') != std::string::npos) throw SafetyError("lexicon entries must be single words: '" + line + "'");
    lex.words.insert(word);
  }
  if (lex.words.empty()) throw SafetyError("lexicon is empty: " + path.string());
  return lex;
}

OffensiveLexicon OffensiveLexicon::from_words(std::initializer_list<std::string_view> words) {
  OffensiveLexicon lex;
  for (auto w : words) {
    const std::string n = normalize(w);
    if (n.empty() || n.find(' ') != std::string::npos) throw SafetyError("invalid lexicon word");
    lex.words.insert(n);
  }
  return lex;
}

void FilterPolicy::validate(const OffensiveLexicon& lexicon) const {
  if (max_regenerations < 0) throw SafetyError("max_regenerations must be nonnegative");
  if (contains_offensive(fallback_text, lexicon)) throw SafetyError("fallback text fails the filter");
}

std::uint64_t SeedStream::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FilteredReply filtered_generate(const GenerateFn& generate, const OffensiveLexicon& lexicon, const FilterPolicy& policy,
                                SeedStream& seeds) {
  policy.validate(lexicon);
  FilteredReply out;
  for (int attempt = 0; attempt <= policy.max_regenerations; ++attempt) {
    std::string candidate = generate(seeds.next());
    ++out.calls;
    if (!contains_offensive(candidate, lexicon)) {
      out.text = std::move(candidate);
      return out;
    }
  }
  out.text = policy.fallback_text;
  out.used_fallback = true;
  return out;
}

}  // namespace freetalky::safety

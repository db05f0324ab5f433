#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace freetalky::safety {

class SafetyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OffensiveLexicon {
  std::set<std::string> words;  // normalized, no whitespace
  std::filesystem::path source_path;

  // One word per line; '#' starts a comment; blank lines are skipped.
  static OffensiveLexicon load(const std::filesystem::path& path);
  static OffensiveLexicon from_words(std::initializer_list<std::string_view> words);
};

// Lowercase and strip punctuation, collapsing whitespace. Idempotent.
std::string normalize(std::string_view text);

// Whole-token membership test on the normalized text.
bool contains_offensive(std::string_view text, const OffensiveLexicon& lexicon);

struct FilterPolicy {
  int max_regenerations = 3;
  std::string fallback_text = "Let's talk about something else!";

  // Throws SafetyError if the fallback itself is offensive or the bound is negative.
  void validate(const OffensiveLexicon& lexicon) const;
};

// Successive generation seeds derived from a base seed (splitmix64).
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t base) : state_(base) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

struct FilteredReply {
  std::string text;
  int calls = 0;
  bool used_fallback = false;
};

using GenerateFn = std::function<std::string(std::uint64_t seed)>;

// Calls `generate` with fresh seeds up to 1 + max_regenerations times and
// returns the first clean reply, or the policy fallback.
FilteredReply filtered_generate(const GenerateFn& generate, const OffensiveLexicon& lexicon, const FilterPolicy& policy,
                                SeedStream& seeds);

}  // namespace freetalky::safety

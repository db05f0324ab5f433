#pragma once

#include "freetalky/gec/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string_view>

namespace freetalky::gec {

// One way a rule can fire: the word at position i is in `rewrite`, and, when
// `after` is non-empty, the word at i - 1 is in `after`. The word is replaced
// by its mapped value, or deleted when the value is empty. Deleting the first
// word capitalizes the new first word.
struct NoisePattern {
  std::set<std::string> after;
  std::map<std::string, std::string> rewrite;
};

struct NoiseRule {
  std::string name;
  double probability = 0.5;
  std::vector<NoisePattern> patterns;

  // Throws GecError on a probability outside [0, 1] or an identity rewrite.
  void validate() const;
  // Word positions where some pattern matches.
  std::vector<std::size_t> matches(std::span<const std::string> tokens) const;
  // Applies the pattern matching at `position`.
  std::vector<std::string> apply_at(std::span<const std::string> tokens, std::size_t position) const;
};

// To-deletion, article deletion, copula deletion, subject-verb agreement
// swap, preposition substitution, applied in that order.
std::vector<NoiseRule> default_noise_rules(double probability = 0.5);

struct ParallelPair {
  std::string noisy;
  std::string clean;

  bool operator==(const ParallelPair&) const = default;
};

// Each rule fires with its probability at one uniformly chosen match.
std::string add_noise(std::string_view clean, std::span<const NoiseRule> rules, std::mt19937_64& rng);

std::vector<ParallelPair> gen_noisy_corpus(std::span<const std::string> clean_sentences,
                                           std::span<const NoiseRule> rules, std::uint64_t seed);

// Templated clean sentences. Proper-noun slots draw from `names` and
// `places`; empty pools select the built-in lists.
struct CleanSentenceOptions {
  std::vector<std::string> names;
  std::vector<std::string> places;
};
std::vector<std::string> gen_clean_sentences(int count, std::uint64_t seed, const CleanSentenceOptions& options = {});

const std::vector<std::string>& default_names();
const std::vector<std::string>& default_places();
// Proper nouns that never occur in generated training data.
const std::vector<std::string>& unseen_names();

// One "noisy<TAB>clean" pair per line.
void write_parallel_corpus(const std::filesystem::path& path, std::span<const ParallelPair> pairs);
std::vector<ParallelPair> read_parallel_corpus(const std::filesystem::path& path);

}  // namespace freetalky::gec

#pragma once

#include "freetalky/gec/correct.hpp"
#include "freetalky/gec/model.hpp"
#include "freetalky/nn/layers.hpp"
#include "freetalky/session/session.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace freetalky::testing {

// Removed with its contents on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct GradCheckResult {
  // ||analytic - numeric|| / max(||analytic||, ||numeric||) per tensor, worst case.
  double worst_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t checked_entries = 0;
};

// Central differences with step h on up to `per_tensor` random entries of
// every parameter, compared with the reverse-mode gradient of `loss`.
GradCheckResult gradient_check(const nn::ParameterSet& params, const std::function<nn::Var()>& loss, std::size_t per_tensor,
                               std::mt19937_64& rng, double h = 1e-5);

// Levenshtein distance by exhaustive recursion over alignments, no memo.
std::size_t brute_force_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Random token pairs of length <= max_len over a small alphabet. Counts
// pairs whose extracted edits fail to rebuild the target or are not minimal
// by the brute-force distance.
std::size_t edit_round_trip_failures(std::uint64_t seed, int pairs, int max_len);

// Largest |sum - 1| of the copy mixture over random distributions, gates and
// sources with repeated and out-of-vocabulary words.
double copy_mixture_worst_sum_error(std::uint64_t seed, int trials);

// Finite-difference check of the copy-path training loss of a toy corrector
// whose target contains a word only reachable by copying.
GradCheckResult gec_copy_gradient_check(int layers, std::uint64_t seed);

// Finite-difference check of the dialogue language-model loss on a toy
// decoder with `layers` blocks.
GradCheckResult dialogue_lm_gradient_check(int layers, std::uint64_t seed);

// Corrections looked up in a table; anything else is returned unchanged.
// Edits and the gate verdict come from the production helpers.
class TableCorrector : public gec::Corrector {
 public:
  explicit TableCorrector(std::map<std::string, std::string> table) : table_(std::move(table)) {}
  gec::GecResult correct(std::string_view sentence) const override;
  mutable int calls = 0;

 private:
  std::map<std::string, std::string> table_;
};

// Drives `sequences` random operation sequences through the session
// lifecycle and compares every outcome with a hand-written phase table.
// Returns a description of the first disagreement, or an empty string.
std::string session_property_violation(std::uint64_t seed, int sequences, int steps_per_sequence = 30);

// The example tutoring session used across tests.
namespace sample_chat {

inline const std::vector<std::string> kPersona = {"I live in colorado.", "I like to go hiking in the spring.",
                                                  "My favorite activity is rock climbing.",
                                                  "I am a mechanical engineer."};

// User utterances during the conversation, ending with the end command.
inline const std::vector<std::string> kUserTurns = {
    "Hi how are you?",
    "Wow... That’s awesome. I am going to study English.",
    "I want visit Colorado. I think you like outdoor activities!",
    "I see. You.. engineer?",
    "Okay.. It’s nice to meet you. Bye.",
};

inline constexpr const char* kConsentAnswer = "Yes please.";

inline constexpr const char* kFeedbackColorado =
    "You said, “I want visit Colorado”, but “I want to visit Colorado”, is a more grammatically "
    "correct expression.";
inline constexpr const char* kFeedbackEngineer =
    "You said, “You engineer?”, but “Are you an engineer?” is a more grammatically correct "
    "expression.";

// The two corrections of the session.
inline const std::map<std::string, std::string> kCorrections = {
    {"I want visit Colorado.", "I want to visit Colorado."},
    {"You engineer?", "Are you an engineer?"},
};

}  // namespace sample_chat

}  // namespace freetalky::testing

#pragma once

#include "freetalky/session/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace freetalky::dialogue {

using session::PersonaProfile;
using session::Turn;

class DialogueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyPersona : public DialogueError {
 public:
  using DialogueError::DialogueError;
};

class InputTooLong : public DialogueError {
 public:
  using DialogueError::DialogueError;
};

class NoLabeledPositions : public DialogueError {
 public:
  using DialogueError::DialogueError;
};

class InvalidCorpus : public DialogueError {
 public:
  using DialogueError::DialogueError;
};

class CorpusVocabMismatch : public DialogueError {
 public:
  using DialogueError::DialogueError;
};

struct DialogueModelConfig {
  int num_layers = 2;
  int num_heads = 4;
  int embedding_dim = 48;
  int feedforward_dim = 96;
  int max_positions = 64;
  double lm_loss_weight = 2.0;
  double mc_loss_weight = 1.0;
  double dropout = 0.0;

  void validate() const;
};

enum class Segment : int { Persona = 0, User = 1, Bot = 2 };
inline constexpr int kSegmentCount = 3;

struct SerializedInput {
  std::vector<int> token_ids;
  std::vector<int> segment_ids;
  // True on the response tokens and the closing EOS.
  std::vector<bool> lm_label_mask;

  std::size_t size() const { return token_ids.size(); }
  bool has_labels() const;
  // Next-token targets: row t predicts token t + 1 when that token is labeled,
  // otherwise -1.
  std::vector<int> next_token_targets() const;
};

struct DialogueContext {
  PersonaProfile persona;
  std::vector<Turn> history;
};

inline constexpr int kCandidateCount = 20;

struct CandidateBatch {
  DialogueContext context;
  std::vector<std::string> candidates;
  int gold_index = 0;

  // Exactly 20 candidates and a valid gold index.
  void validate() const;
};

struct DecodeConfig {
  int max_new_tokens = 24;
  double temperature = 0.8;
  int top_k = 40;
  double top_p = 1.0;
  int no_repeat_ngram = 2;
  bool ban_unk = true;
  std::uint64_t rng_seed = 0;
  // Returned when sampling yields no tokens.
  std::string fallback_reply = "Tell me more about you!";

  void validate() const;
};

// One training record: persona, history (alternating user/bot, starting with
// the user), the gold response and 19 distractors.
struct DialogueExample {
  std::vector<std::string> persona;
  std::vector<std::string> history;
  std::string gold;
  std::vector<std::string> distractors;
};

DialogueContext context_of(const DialogueExample& example);

// Places the gold reply at `gold_index` among the distractors.
CandidateBatch make_batch(const DialogueExample& example, int gold_index);

}  // namespace freetalky::dialogue

#pragma once

#include "freetalky/dialogue/types.hpp"
#include "freetalky/nn/layers.hpp"
#include "freetalky/text/vocabulary.hpp"

#include <filesystem>
#include <random>

namespace freetalky::dialogue {

// Lowercase word/punctuation tokens, the dialogue model's tokenizer.
std::vector<std::string> dialogue_tokens(std::string_view text);

// Layout: [BOS, persona..., (speaker, turn...)*, <bot>, response..., EOS].
// With an empty response the sequence ends at the <bot> prefix and nothing is
// labeled. Oldest history turns are dropped until the sequence fits in
// max_positions; persona and response are never truncated (InputTooLong).
SerializedInput build_input(const PersonaProfile& persona, std::span<const Turn> history, std::string_view response,
                            const text::Vocabulary& vocab, int max_positions);

// GPT-style decoder with a tied language-model head and a scalar
// classification head read at the final position.
class DialogueModel {
 public:
  DialogueModel(DialogueModelConfig config, text::Vocabulary vocab, std::uint64_t seed);
  // Layers alias the parameter nodes, so copies would share weights.
  DialogueModel(const DialogueModel&) = delete;
  DialogueModel& operator=(const DialogueModel&) = delete;
  DialogueModel(DialogueModel&&) = default;
  DialogueModel& operator=(DialogueModel&&) = default;

  const DialogueModelConfig& config() const { return config_; }
  const text::Vocabulary& vocab() const { return vocab_; }
  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }

  struct Output {
    nn::Var logits;    // T x |V|
    nn::Var mc_score;  // 1 x 1
  };

  // `dropout_rng` enables dropout when non-null.
  Output forward(const SerializedInput& input, std::mt19937_64* dropout_rng = nullptr) const;

  SerializedInput serialize(const DialogueContext& ctx, std::string_view response) const {
    return build_input(ctx.persona, ctx.history, response, vocab_, config_.max_positions);
  }

  void save(const std::filesystem::path& path) const;
  static DialogueModel load(const std::filesystem::path& path);

 private:
  DialogueModelConfig config_;
  text::Vocabulary vocab_;
  nn::ParameterSet params_;
  nn::Var token_embedding_;
  nn::Var position_embedding_;
  nn::Var segment_embedding_;
  std::vector<nn::TransformerBlock> blocks_;
  nn::LayerNorm final_norm_;
  nn::Linear mc_head_;
};

}  // namespace freetalky::dialogue

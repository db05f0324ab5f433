#pragma once

#include "freetalky/dialogue/model.hpp"

namespace freetalky::dialogue {

// Sampling distribution for the next reply token. Structural specials
// (PAD, BOS, speaker markers) are never allowed, UNK is removed when
// ban_unk is set, and any token that would complete an n-gram already present
// in `generated` is removed. Temperature, then top-k, then top-p are applied
// and the result is renormalized. If every token is blocked all mass goes to
// EOS.
std::vector<double> next_token_distribution(const Eigen::Ref<const Eigen::RowVectorXd>& logits,
                                            std::span<const int> generated, const DecodeConfig& config,
                                            const text::Vocabulary& vocab);

// Draws an index from a probability vector with a uniform in [0, 1).
int sample_index(std::span<const double> probs, double uniform);

struct Generation {
  std::string text;
  std::vector<int> token_ids;
};

// Autoregressive sampling from the language-model head until EOS or
// max_new_tokens. Deterministic for a given rng_seed.
Generation generate(const DialogueModel& model, const DialogueContext& context, const DecodeConfig& config);

inline std::string generate_reply(const DialogueModel& model, const PersonaProfile& persona,
                                  std::span<const Turn> history, const DecodeConfig& config) {
  return generate(model, DialogueContext{persona, {history.begin(), history.end()}}, config).text;
}

}  // namespace freetalky::dialogue

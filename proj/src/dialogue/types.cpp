#include "freetalky/dialogue/types.hpp"

#include <algorithm>

namespace freetalky::dialogue {

void DialogueModelConfig::validate() const {
  if (num_layers <= 0 || num_heads <= 0 || embedding_dim <= 0 || feedforward_dim <= 0 || max_positions <= 0)
    throw DialogueError("model dimensions must be positive");
  if (embedding_dim % num_heads != 0) throw DialogueError("embedding_dim must be divisible by num_heads");
  if (lm_loss_weight < 0.0 || mc_loss_weight < 0.0) throw DialogueError("loss weights must be nonnegative");
  if (dropout < 0.0 || dropout >= 1.0) throw DialogueError("dropout must lie in [0, 1)");
}

bool SerializedInput::has_labels() const {
  return std::any_of(lm_label_mask.begin(), lm_label_mask.end(), [](bool b) { return b; });
}

std::vector<int> SerializedInput::next_token_targets() const {
  std::vector<int> targets(token_ids.size(), -1);
  for (std::size_t t = 0; t + 1 < token_ids.size(); ++t)
    if (lm_label_mask[t + 1]) targets[t] = token_ids[t + 1];
  return targets;
}

void CandidateBatch::validate() const {
  if (candidates.size() != static_cast<std::size_t>(kCandidateCount))
    throw DialogueError("a candidate batch holds exactly 20 candidates, got " + std::to_string(candidates.size()));
  if (gold_index < 0 || gold_index >= kCandidateCount) throw DialogueError("gold index out of range");
}

void DecodeConfig::validate() const {
  if (max_new_tokens <= 0) throw DialogueError("max_new_tokens must be positive");
  if (!(temperature > 0.0)) throw DialogueError("temperature must be positive");
  if (top_k < 0) throw DialogueError("top_k must be nonnegative");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw DialogueError("top_p must lie in (0, 1]");
  if (no_repeat_ngram < 0) throw DialogueError("no_repeat_ngram must be nonnegative");
  if (top_k == 0 && top_p >= 1.0) throw DialogueError("sampling needs top_k or top_p restriction");
}

DialogueContext context_of(const DialogueExample& example) {
  DialogueContext ctx;
  ctx.persona.id = 0;
  ctx.persona.sentences = example.persona;
  for (std::size_t i = 0; i < example.history.size(); ++i)
    ctx.history.push_back(Turn{i % 2 == 0 ? session::Speaker::User : session::Speaker::System, example.history[i], i,
                               session::SessionPhase::Conversing});
  return ctx;
}

CandidateBatch make_batch(const DialogueExample& example, int gold_index) {
  if (example.distractors.size() != static_cast<std::size_t>(kCandidateCount - 1))
    throw InvalidCorpus("each example needs 19 distractors");
  CandidateBatch b;
  b.context = context_of(example);
  b.candidates = example.distractors;
  b.candidates.insert(b.candidates.begin() + gold_index, example.gold);
  b.gold_index = gold_index;
  b.validate();
  return b;
}

}  // namespace freetalky::dialogue

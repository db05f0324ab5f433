#include "freetalky/dialogue/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace freetalky::dialogue {

nn::Var lm_loss_from_logits(const nn::Var& logits, const SerializedInput& input, std::size_t* labeled) {
  if (!input.has_labels()) throw NoLabeledPositions("lm_loss needs at least one labeled position");
  const auto targets = input.next_token_targets();
  return nn::cross_entropy(logits, targets, labeled);
}

nn::Var lm_loss(const DialogueModel& model, const SerializedInput& input, std::size_t* labeled) {
  if (!input.has_labels()) throw NoLabeledPositions("lm_loss needs at least one labeled position");
  return lm_loss_from_logits(model.forward(input).logits, input, labeled);
}

nn::Var mc_loss_from_scores(const nn::Var& scores, int gold_index) {
  const int target = gold_index;
  return nn::cross_entropy(scores, std::span<const int>(&target, 1));
}

double mc_loss_from_scores(std::span<const double> scores, int gold_index) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  return mx + std::log(z) - scores[static_cast<std::size_t>(gold_index)];
}

nn::Var mc_loss(const DialogueModel& model, const CandidateBatch& batch) {
  batch.validate();
  std::vector<nn::Var> scores;
  scores.reserve(batch.candidates.size());
  for (const auto& c : batch.candidates) scores.push_back(model.forward(model.serialize(batch.context, c)).mc_score);
  return mc_loss_from_scores(nn::concat_cols(scores), batch.gold_index);
}

nn::Var combine_losses(const nn::Var& lm, const nn::Var& mc, const DialogueModelConfig& config) {
  return nn::add(nn::scale(lm, config.lm_loss_weight), nn::scale(mc, config.mc_loss_weight));
}

nn::Var total_loss(const DialogueModel& model, const SerializedInput& input, const CandidateBatch& batch,
                   const DialogueModelConfig& config) {
  return combine_losses(lm_loss(model, input), mc_loss(model, batch), config);
}

}  // namespace freetalky::dialogue

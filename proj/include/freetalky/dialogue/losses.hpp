#pragma once

#include "freetalky/dialogue/model.hpp"

#include <span>

namespace freetalky::dialogue {

// Mean next-token cross-entropy over the labeled (response) positions.
// Throws NoLabeledPositions when nothing is labeled.
nn::Var lm_loss(const DialogueModel& model, const SerializedInput& input, std::size_t* labeled = nullptr);
nn::Var lm_loss_from_logits(const nn::Var& logits, const SerializedInput& input, std::size_t* labeled = nullptr);

// 20-way softmax cross-entropy of the classification scores against the gold
// candidate.
nn::Var mc_loss(const DialogueModel& model, const CandidateBatch& batch);
nn::Var mc_loss_from_scores(const nn::Var& scores, int gold_index);
double mc_loss_from_scores(std::span<const double> scores, int gold_index);

// lm_loss_weight * lm + mc_loss_weight * mc
nn::Var total_loss(const DialogueModel& model, const SerializedInput& input, const CandidateBatch& batch,
                   const DialogueModelConfig& config);
nn::Var combine_losses(const nn::Var& lm, const nn::Var& mc, const DialogueModelConfig& config);

}  // namespace freetalky::dialogue

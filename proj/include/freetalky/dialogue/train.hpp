#pragma once

#include "freetalky/dialogue/model.hpp"

#include <functional>
#include <optional>

namespace freetalky::dialogue {

struct DialogueTrainOptions {
  int epochs = 10;
  std::uint64_t seed = 7;
  double learning_rate = 3e-3;
  int batch_size = 8;
  // Candidates scored per example in the classification loss (gold included).
  // Evaluation always uses all 20.
  int train_candidates = 4;
  // Called after every epoch with (epoch index, mean total loss).
  std::function<void(int, double)> on_epoch;
};

struct DialogueTrainResult {
  DialogueModel model;
  std::vector<double> epoch_losses;
};

// Vocabulary covering every token of the corpus.
text::Vocabulary build_dialogue_vocab(std::span<const DialogueExample> corpus);

// Joint training of the language-model and candidate-classification heads.
// When `vocab` is given every corpus token must already be in it
// (CorpusVocabMismatch otherwise). Deterministic given options.seed.
DialogueTrainResult train_dialogue(std::span<const DialogueExample> corpus, const DialogueModelConfig& config,
                                   const DialogueTrainOptions& options,
                                   std::optional<text::Vocabulary> vocab = std::nullopt);

// Same as above, continuing from an existing model.
std::vector<double> train_dialogue_in_place(DialogueModel& model, std::span<const DialogueExample> corpus,
                                            const DialogueTrainOptions& options);

}  // namespace freetalky::dialogue

#pragma once

#include "freetalky/gec/model.hpp"
#include "freetalky/gec/noise.hpp"

#include <functional>

namespace freetalky::gec {

struct GecTrainOptions {
  int epochs = 40;
  std::uint64_t seed = 7;
  double learning_rate = 2e-3;
  int batch_size = 8;
  // Words seen fewer times stay out of the vocabulary and can only be copied.
  int vocab_min_count = 2;
  std::function<void(int, double)> on_epoch;
};

struct GecTrainResult {
  GecModel model;
  std::vector<double> epoch_losses;
};

text::Vocabulary build_gec_vocab(std::span<const ParallelPair> pairs, int min_count);

// Throws GecError on an empty corpus and SequenceTooLong on an overlong pair.
GecTrainResult train_gec(std::span<const ParallelPair> pairs, const GecConfig& config, const GecTrainOptions& options);
std::vector<double> train_gec_in_place(GecModel& model, std::span<const ParallelPair> pairs,
                                       const GecTrainOptions& options);

}  // namespace freetalky::gec

#include "freetalky/gec/train.hpp"

#include "freetalky/gec/edits.hpp"
#include "freetalky/nn/optim.hpp"

#include <numeric>

namespace freetalky::gec {

text::Vocabulary build_gec_vocab(std::span<const ParallelPair> pairs, int min_count) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    sentences.push_back(gec_tokens(p.noisy));
    sentences.push_back(gec_tokens(p.clean));
  }
  return text::Vocabulary::build(sentences, min_count);
}

std::vector<double> train_gec_in_place(GecModel& model, std::span<const ParallelPair> pairs,
                                       const GecTrainOptions& options) {
  if (pairs.empty()) throw GecError("training needs at least one pair");
  if (options.batch_size <= 0) throw GecError("batch_size must be positive");
  std::vector<EncodedPair> encoded;
  encoded.reserve(pairs.size());
  for (const auto& p : pairs) encoded.push_back(model.encode(gec_tokens(p.noisy), gec_tokens(p.clean)));

  std::mt19937_64 rng(options.seed);
  std::mt19937_64* dropout_rng = model.config().dropout > 0.0 ? &rng : nullptr;
  nn::Adam optimizer(model.parameters(), {.learning_rate = options.learning_rate});
  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> trace;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    // Linear decay to a tenth of the base rate by the last epoch.
    const double progress = options.epochs > 1 ? static_cast<double>(epoch) / (options.epochs - 1) : 0.0;
    optimizer.set_learning_rate(options.learning_rate * (1.0 - 0.9 * progress));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double total = 0.0;
    int pending = 0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const nn::Var loss = model.loss(encoded[order[step]], dropout_rng);
      loss.backward();
      total += loss.item();
      if (++pending == options.batch_size || step + 1 == order.size()) {
        optimizer.step(pending);
        pending = 0;
      }
    }
    trace.push_back(total / static_cast<double>(order.size()));
    if (options.on_epoch) options.on_epoch(epoch, trace.back());
  }
  return trace;
}

GecTrainResult train_gec(std::span<const ParallelPair> pairs, const GecConfig& config, const GecTrainOptions& options) {
  if (pairs.empty()) throw GecError("training needs at least one pair");
  GecModel model(config, build_gec_vocab(pairs, options.vocab_min_count), options.seed);
  auto trace = train_gec_in_place(model, pairs, options);
  return {std::move(model), std::move(trace)};
}

}  // namespace freetalky::gec

#include "freetalky/dialogue/train.hpp"

#include "freetalky/dialogue/losses.hpp"
#include "freetalky/nn/optim.hpp"

#include <numeric>
#include <random>

namespace freetalky::dialogue {

namespace {

void collect(std::vector<std::vector<std::string>>& out, const DialogueExample& ex) {
  for (const auto& s : ex.persona) out.push_back(dialogue_tokens(s));
  for (const auto& s : ex.history) out.push_back(dialogue_tokens(s));
  out.push_back(dialogue_tokens(ex.gold));
  for (const auto& s : ex.distractors) out.push_back(dialogue_tokens(s));
}

void validate_corpus(std::span<const DialogueExample> corpus) {
  if (corpus.empty()) throw InvalidCorpus("training corpus is empty");
  for (const auto& ex : corpus) {
    if (ex.distractors.size() != static_cast<std::size_t>(kCandidateCount - 1))
      throw InvalidCorpus("each example needs 19 distractors");
    if (ex.persona.empty()) throw EmptyPersona("training example without persona");
  }
}

}  // namespace

text::Vocabulary build_dialogue_vocab(std::span<const DialogueExample> corpus) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& ex : corpus) collect(sentences, ex);
  return text::Vocabulary::build(sentences, 1);
}

std::vector<double> train_dialogue_in_place(DialogueModel& model, std::span<const DialogueExample> corpus,
                                            const DialogueTrainOptions& options) {
  validate_corpus(corpus);
  if (options.train_candidates < 2 || options.train_candidates > kCandidateCount)
    throw DialogueError("train_candidates must lie in [2, 20]");
  if (options.batch_size <= 0) throw DialogueError("batch_size must be positive");

  std::mt19937_64 rng(options.seed);
  nn::Adam optimizer(model.parameters(), {.learning_rate = options.learning_rate});
  const auto& config = model.config();
  std::mt19937_64* dropout_rng = config.dropout > 0.0 ? &rng : nullptr;

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> trace;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double epoch_total = 0.0;
    int pending = 0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const auto& ex = corpus[order[step]];
      const DialogueContext ctx = context_of(ex);

      // Gold first, then a random subset of distractors; the gold slot is
      // then moved to a random position so the head cannot learn an index.
      std::vector<std::size_t> picks(ex.distractors.size());
      std::iota(picks.begin(), picks.end(), 0);
      for (std::size_t i = picks.size(); i > 1; --i) std::swap(picks[i - 1], picks[rng() % i]);
      std::vector<const std::string*> candidates{&ex.gold};
      for (int k = 0; k + 1 < options.train_candidates; ++k) candidates.push_back(&ex.distractors[picks[static_cast<std::size_t>(k)]]);
      const std::size_t gold_slot = rng() % candidates.size();
      std::swap(candidates[0], candidates[gold_slot]);

      std::vector<nn::Var> scores;
      nn::Var lm;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const SerializedInput input = model.serialize(ctx, *candidates[c]);
        auto out = model.forward(input, dropout_rng);
        scores.push_back(out.mc_score);
        if (c == gold_slot) lm = lm_loss_from_logits(out.logits, input);
      }
      const nn::Var mc = mc_loss_from_scores(nn::concat_cols(scores), static_cast<int>(gold_slot));
      const nn::Var loss = combine_losses(lm, mc, config);
      loss.backward();
      epoch_total += loss.item();
      if (++pending == options.batch_size || step + 1 == order.size()) {
        optimizer.step(pending);
        pending = 0;
      }
    }
    trace.push_back(epoch_total / static_cast<double>(order.size()));
    if (options.on_epoch) options.on_epoch(epoch, trace.back());
  }
  return trace;
}

DialogueTrainResult train_dialogue(std::span<const DialogueExample> corpus, const DialogueModelConfig& config,
                                   const DialogueTrainOptions& options, std::optional<text::Vocabulary> vocab) {
  validate_corpus(corpus);
  if (vocab) {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& ex : corpus) collect(sentences, ex);
    for (const auto& s : sentences)
      for (const auto& t : s)
        if (!vocab->contains(t)) throw CorpusVocabMismatch("corpus token '" + t + "' is not in the vocabulary");
  } else {
    vocab = build_dialogue_vocab(corpus);
  }
  DialogueModel model(config, std::move(*vocab), options.seed);
  auto trace = train_dialogue_in_place(model, corpus, options);
  return {std::move(model), std::move(trace)};
}

}  // namespace freetalky::dialogue

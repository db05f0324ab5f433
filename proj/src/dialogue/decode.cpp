#include "freetalky/dialogue/decode.hpp"

#include "freetalky/text/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace freetalky::dialogue {

using text::Vocabulary;

namespace {

// Tokens that would repeat an n-gram of `generated` if emitted next.
std::vector<int> blocked_by_ngram(std::span<const int> generated, int n) {
  std::vector<int> blocked;
  if (n <= 0) return blocked;
  const std::size_t len = generated.size();
  const std::size_t prefix = static_cast<std::size_t>(n - 1);
  if (len < prefix) return blocked;
  for (std::size_t start = 0; start + prefix < len; ++start) {
    if (std::equal(generated.begin() + static_cast<long>(start), generated.begin() + static_cast<long>(start + prefix),
                   generated.end() - static_cast<long>(prefix)))
      blocked.push_back(generated[start + prefix]);
  }
  return blocked;
}

}  // namespace

std::vector<double> next_token_distribution(const Eigen::Ref<const Eigen::RowVectorXd>& logits,
                                            std::span<const int> generated, const DecodeConfig& config,
                                            const Vocabulary& vocab) {
  const int v = vocab.size();
  if (logits.size() != v) throw DialogueError("logit width does not match vocabulary");
  std::vector<bool> allowed(static_cast<std::size_t>(v), true);
  for (int id : {Vocabulary::kPad, Vocabulary::kBos, Vocabulary::kSpeakerUser, Vocabulary::kSpeakerBot})
    allowed[static_cast<std::size_t>(id)] = false;
  if (config.ban_unk) allowed[Vocabulary::kUnk] = false;
  for (int id : blocked_by_ngram(generated, config.no_repeat_ngram)) allowed[static_cast<std::size_t>(id)] = false;

  std::vector<int> ids;
  for (int i = 0; i < v; ++i)
    if (allowed[static_cast<std::size_t>(i)]) ids.push_back(i);
  std::vector<double> probs(static_cast<std::size_t>(v), 0.0);
  if (ids.empty()) {
    probs[Vocabulary::kEos] = 1.0;
    return probs;
  }

  // Highest logit first; ties keep the lower id first.
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return logits(a) > logits(b); });
  if (config.top_k > 0 && ids.size() > static_cast<std::size_t>(config.top_k)) ids.resize(static_cast<std::size_t>(config.top_k));

  const double mx = logits(ids.front()) / config.temperature;
  std::vector<double> weights(ids.size());
  double z = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) z += weights[i] = std::exp(logits(ids[i]) / config.temperature - mx);

  std::size_t keep = ids.size();
  if (config.top_p < 1.0) {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      cumulative += weights[i] / z;
      if (cumulative >= config.top_p) {
        keep = i + 1;
        break;
      }
    }
  }
  double kept_mass = 0.0;
  for (std::size_t i = 0; i < keep; ++i) kept_mass += weights[i];
  for (std::size_t i = 0; i < keep; ++i) probs[static_cast<std::size_t>(ids[i])] = weights[i] / kept_mass;
  return probs;
}

int sample_index(std::span<const double> probs, double uniform) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = static_cast<int>(i);
    if (uniform < cumulative) return last_positive;
  }
  return last_positive;
}

Generation generate(const DialogueModel& model, const DialogueContext& context, const DecodeConfig& config) {
  config.validate();
  nn::NoGradGuard no_grad;
  const auto& vocab = model.vocab();
  const int max_positions = model.config().max_positions;
  const int budget = std::max(max_positions - config.max_new_tokens, max_positions / 2);
  SerializedInput input = build_input(context.persona, context.history, "", vocab, budget);

  std::mt19937_64 rng(config.rng_seed);
  Generation out;
  while (static_cast<int>(out.token_ids.size()) < config.max_new_tokens &&
         static_cast<int>(input.size()) < max_positions) {
    const auto logits = model.forward(input).logits;
    const Eigen::RowVectorXd last = logits.value().row(logits.rows() - 1);
    const auto probs = next_token_distribution(last, out.token_ids, config, vocab);
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const int next = sample_index(probs, u);
    if (next == Vocabulary::kEos) break;
    out.token_ids.push_back(next);
    input.token_ids.push_back(next);
    input.segment_ids.push_back(static_cast<int>(Segment::Bot));
    input.lm_label_mask.push_back(false);
  }
  const auto words = vocab.decode(out.token_ids);
  out.text = text::detokenize(words);
  if (text::trim(out.text).empty()) out.text = config.fallback_reply;
  return out;
}

}  // namespace freetalky::dialogue

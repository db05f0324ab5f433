#include "freetalky/dialogue/evaluate.hpp"

#include "freetalky/dialogue/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace freetalky::dialogue {

std::vector<double> score_candidates(const DialogueModel& model, const DialogueContext& context,
                                     std::span<const std::string> candidates) {
  nn::NoGradGuard no_grad;
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(model.forward(model.serialize(context, c)).mc_score.item());
  return scores;
}

CandidateScorer model_scorer(const DialogueModel& model) {
  return [&model](const DialogueContext& ctx, std::span<const std::string> candidates) {
    return score_candidates(model, ctx, candidates);
  };
}

std::vector<RankedCandidate> rank_scores(std::span<const double> scores) {
  if (scores.size() < 2) throw DialogueError("ranking needs at least two candidates");
  std::vector<RankedCandidate> ranked;
  for (std::size_t i = 0; i < scores.size(); ++i) ranked.push_back({i, scores[i]});
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  return ranked;
}

std::vector<RankedCandidate> rank_candidates(const DialogueModel& model, const DialogueContext& context,
                                             std::span<const std::string> candidates) {
  if (candidates.size() < 2) throw DialogueError("ranking needs at least two candidates");
  const auto scores = score_candidates(model, context, candidates);
  return rank_scores(scores);
}

double eval_hits_at_1(const CandidateScorer& scorer, std::span<const CandidateBatch> dataset) {
  if (dataset.empty()) throw DialogueError("hits@1 needs a non-empty dataset");
  std::size_t hits = 0;
  for (const auto& batch : dataset) {
    batch.validate();
    const auto scores = scorer(batch.context, batch.candidates);
    if (rank_scores(scores).front().index == static_cast<std::size_t>(batch.gold_index)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

double eval_hits_at_1(const DialogueModel& model, std::span<const CandidateBatch> dataset) {
  return eval_hits_at_1(model_scorer(model), dataset);
}

double eval_mean_lm_loss(const DialogueModel& model, std::span<const SerializedInput> dataset) {
  if (dataset.empty()) throw DialogueError("perplexity needs a non-empty dataset");
  nn::NoGradGuard no_grad;
  double weighted = 0.0;
  std::size_t tokens = 0;
  for (const auto& input : dataset) {
    std::size_t n = 0;
    weighted += lm_loss(model, input, &n).item() * static_cast<double>(n);
    tokens += n;
  }
  return weighted / static_cast<double>(tokens);
}

double eval_perplexity(const DialogueModel& model, std::span<const SerializedInput> dataset) {
  return std::exp(eval_mean_lm_loss(model, dataset));
}

std::vector<CandidateBatch> candidate_batches(std::span<const DialogueExample> corpus, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CandidateBatch> out;
  out.reserve(corpus.size());
  for (const auto& ex : corpus) out.push_back(make_batch(ex, static_cast<int>(rng() % kCandidateCount)));
  return out;
}

std::vector<SerializedInput> gold_inputs(const DialogueModel& model, std::span<const DialogueExample> corpus) {
  std::vector<SerializedInput> out;
  out.reserve(corpus.size());
  for (const auto& ex : corpus) out.push_back(model.serialize(context_of(ex), ex.gold));
  return out;
}

}  // namespace freetalky::dialogue

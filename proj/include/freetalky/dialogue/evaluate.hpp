#pragma once

#include "freetalky/dialogue/model.hpp"

#include <functional>

namespace freetalky::dialogue {

// Scores a list of candidate replies for a context; higher is better.
using CandidateScorer = std::function<std::vector<double>(const DialogueContext&, std::span<const std::string>)>;

// Classification-head score of each candidate, computed independently.
std::vector<double> score_candidates(const DialogueModel& model, const DialogueContext& context,
                                     std::span<const std::string> candidates);
CandidateScorer model_scorer(const DialogueModel& model);

struct RankedCandidate {
  std::size_t index;
  double score;
};

// Descending by score; ties keep the lower original index first. Needs at
// least two candidates.
std::vector<RankedCandidate> rank_scores(std::span<const double> scores);
std::vector<RankedCandidate> rank_candidates(const DialogueModel& model, const DialogueContext& context,
                                             std::span<const std::string> candidates);

// Fraction of batches whose gold candidate is ranked first.
double eval_hits_at_1(const CandidateScorer& scorer, std::span<const CandidateBatch> dataset);
double eval_hits_at_1(const DialogueModel& model, std::span<const CandidateBatch> dataset);

// Token-weighted mean language-model loss over the dataset.
double eval_mean_lm_loss(const DialogueModel& model, std::span<const SerializedInput> dataset);
// exp(eval_mean_lm_loss)
double eval_perplexity(const DialogueModel& model, std::span<const SerializedInput> dataset);

// Held-out evaluation sets built from a corpus with seeded gold placement.
std::vector<CandidateBatch> candidate_batches(std::span<const DialogueExample> corpus, std::uint64_t seed);
std::vector<SerializedInput> gold_inputs(const DialogueModel& model, std::span<const DialogueExample> corpus);

}  // namespace freetalky::dialogue

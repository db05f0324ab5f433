#pragma once

#include "freetalky/gec/model.hpp"
#include "freetalky/session/types.hpp"

#include <memory>

namespace freetalky::gec {

struct Hypothesis {
  std::vector<std::string> tokens;
  double log_prob = 0.0;
  // log_prob / (tokens + 1), the closing <eos> included.
  double normalized() const { return log_prob / static_cast<double>(tokens.size() + 1); }
};

// Finished hypotheses of a beam search, best first: higher normalized
// log-probability, then lexicographically smaller text. Special tokens other
// than <eos> are never produced. Empty when no hypothesis finished.
std::vector<Hypothesis> beam_search(const GecModel& model, std::span<const std::string> source, int beam_size);

// Throws GecError on an empty sentence. beam_size <= 0 uses the config's.
GecResult correct(const GecModel& model, std::string_view sentence, int beam_size = 0);

class Corrector {
 public:
  virtual ~Corrector() = default;
  virtual GecResult correct(std::string_view sentence) const = 0;
};

class ModelCorrector : public Corrector {
 public:
  explicit ModelCorrector(std::shared_ptr<const GecModel> model) : model_(std::move(model)) {}
  GecResult correct(std::string_view sentence) const override { return gec::correct(*model_, sentence); }
  const GecModel& model() const { return *model_; }

 private:
  std::shared_ptr<const GecModel> model_;
};

// Emitted results over the sentences of every User turn, in order.
std::vector<GecResult> batch_corrections(const Corrector& corrector, std::span<const session::Turn> user_turns);

// Feedback strings for every emitted correction, in turn and sentence order.
std::vector<std::string> batch_feedback(const Corrector& corrector, std::span<const session::Turn> user_turns);

}  // namespace freetalky::gec

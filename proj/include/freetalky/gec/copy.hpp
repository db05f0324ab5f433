#pragma once

#include "freetalky/text/vocabulary.hpp"

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace freetalky::gec {

// Base vocabulary plus temporary ids, numbered from base.size(), for the
// words of one source sentence that the base vocabulary lacks.
class ExtendedVocabulary {
 public:
  ExtendedVocabulary(const text::Vocabulary& base, std::span<const std::string> source_tokens);

  const text::Vocabulary& base() const { return *base_; }
  int base_size() const { return base_->size(); }
  int size() const { return base_->size() + static_cast<int>(extension_.size()); }
  const std::vector<std::string>& extension() const { return extension_; }

  // Base id, extension id, or kUnk.
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  bool is_extension(int id) const { return id >= base_size() && id < size(); }

  // Ids of `tokens` for the model input side: extension words become kUnk.
  std::vector<int> input_ids(std::span<const std::string> tokens) const;
  // Ids over the extended range.
  std::vector<int> extended_ids(std::span<const std::string> tokens) const;

 private:
  const text::Vocabulary* base_;
  std::vector<std::string> extension_;
  std::unordered_map<std::string, int> extension_index_;
};

// P(w) = p_gen * vocab_dist(w) + (1 - p_gen) * sum of attention over source
// positions holding w. Throws std::invalid_argument on a size mismatch, a
// gate outside [0, 1], or inputs that are not distributions.
std::vector<double> copy_mixture_distribution(std::span<const double> vocab_dist, std::span<const double> attention,
                                              double p_gen, std::span<const std::string> source_tokens,
                                              const ExtendedVocabulary& ext_vocab);

}  // namespace freetalky::gec

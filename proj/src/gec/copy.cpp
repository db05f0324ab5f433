#include "freetalky/gec/copy.hpp"

#include <cmath>
#include <stdexcept>

namespace freetalky::gec {

ExtendedVocabulary::ExtendedVocabulary(const text::Vocabulary& base, std::span<const std::string> source_tokens)
    : base_(&base) {
  for (const auto& t : source_tokens) {
    if (base.contains(t) || extension_index_.count(t)) continue;
    extension_index_.emplace(t, base.size() + static_cast<int>(extension_.size()));
    extension_.push_back(t);
  }
}

int ExtendedVocabulary::id(const std::string& token) const {
  if (base_->contains(token)) return base_->id(token);
  const auto it = extension_index_.find(token);
  return it == extension_index_.end() ? text::Vocabulary::kUnk : it->second;
}

const std::string& ExtendedVocabulary::token(int id) const {
  if (is_extension(id)) return extension_[static_cast<std::size_t>(id - base_size())];
  return base_->token(id);
}

std::vector<int> ExtendedVocabulary::input_ids(std::span<const std::string> tokens) const {
  return base_->encode(tokens);
}

std::vector<int> ExtendedVocabulary::extended_ids(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

namespace {

void require_distribution(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(what) + " has a negative or NaN entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument(std::string(what) + " does not sum to 1");
}

}  // namespace

std::vector<double> copy_mixture_distribution(std::span<const double> vocab_dist, std::span<const double> attention,
                                              double p_gen, std::span<const std::string> source_tokens,
                                              const ExtendedVocabulary& ext_vocab) {
  if (vocab_dist.size() != static_cast<std::size_t>(ext_vocab.base_size()))
    throw std::invalid_argument("vocab_dist size differs from the base vocabulary");
  if (attention.size() != source_tokens.size())
    throw std::invalid_argument("attention size differs from the source length");
  if (!(p_gen >= 0.0 && p_gen <= 1.0)) throw std::invalid_argument("p_gen outside [0, 1]");
  require_distribution(vocab_dist, "vocab_dist");
  require_distribution(attention, "attention");

  std::vector<double> out(static_cast<std::size_t>(ext_vocab.size()), 0.0);
  for (std::size_t w = 0; w < vocab_dist.size(); ++w) out[w] = p_gen * vocab_dist[w];
  for (std::size_t i = 0; i < source_tokens.size(); ++i) {
    const int id = ext_vocab.id(source_tokens[i]);
    if (id == text::Vocabulary::kUnk && !ext_vocab.base().contains(source_tokens[i]))
      throw std::invalid_argument("source token '" + source_tokens[i] + "' is not covered by the extended vocabulary");
    out[static_cast<std::size_t>(id)] += (1.0 - p_gen) * attention[i];
  }
  return out;
}

}  // namespace freetalky::gec

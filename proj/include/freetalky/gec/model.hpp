#pragma once

#include "freetalky/gec/copy.hpp"
#include "freetalky/gec/types.hpp"
#include "freetalky/nn/layers.hpp"

#include <filesystem>
#include <random>

namespace freetalky::gec {

// One sentence pair encoded against a base vocabulary.
struct EncodedPair {
  std::vector<std::string> source_tokens;  // words followed by <eos>
  std::vector<int> encoder_ids;            // source_tokens, OOV as <unk>
  std::vector<int> source_extended_ids;    // source_tokens over the extended range
  std::vector<int> decoder_ids;            // <bos> + target, OOV as <unk>
  std::vector<int> targets;                // target + <eos>, extended ids; <unk> if neither known nor copyable
  int extended_size = 0;
};

// Encoder-decoder transformer whose output distribution mixes generation
// over the base vocabulary with copying from the source through a scalar
// gate computed from the decoder state and its copy context.
class GecModel {
 public:
  GecModel(GecConfig config, text::Vocabulary vocab, std::uint64_t seed);
  GecModel(const GecModel&) = delete;
  GecModel& operator=(const GecModel&) = delete;
  GecModel(GecModel&&) = default;
  GecModel& operator=(GecModel&&) = default;

  const GecConfig& config() const { return config_; }
  const text::Vocabulary& vocab() const { return vocab_; }
  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }

  // `target` may be empty, for decoding. Throws SequenceTooLong.
  EncodedPair encode(std::span<const std::string> source, std::span<const std::string> target) const;

  struct Output {
    nn::Var vocab_dist;  // T x |V|
    nn::Var attention;   // T x S
    nn::Var p_gen;       // T x 1
    nn::Var mixture;     // T x (|V| + extension)
  };

  // `dropout_rng` enables dropout when non-null.
  nn::Var encode_source(std::span<const int> encoder_ids, std::mt19937_64* dropout_rng = nullptr) const;
  // Decoder pass over `decoder_ids` against an encoded source.
  Output decode(const nn::Var& memory, std::span<const int> decoder_ids, std::span<const int> source_extended_ids,
                int extended_size, std::mt19937_64* dropout_rng = nullptr) const;
  Output forward(const EncodedPair& pair, std::mt19937_64* dropout_rng = nullptr) const;

  // Teacher-forced mean negative log-likelihood of the mixture.
  nn::Var loss(const EncodedPair& pair, std::mt19937_64* dropout_rng = nullptr) const;

  void save(const std::filesystem::path& path) const;
  static GecModel load(const std::filesystem::path& path);

 private:
  nn::Var embed(std::span<const int> ids) const;

  GecConfig config_;
  text::Vocabulary vocab_;
  nn::ParameterSet params_;
  nn::Var token_embedding_;
  nn::Var position_embedding_;
  std::vector<nn::TransformerBlock> encoder_;
  nn::LayerNorm encoder_norm_;
  std::vector<nn::TransformerBlock> decoder_;
  nn::LayerNorm decoder_norm_;
  nn::Linear copy_query_;
  nn::Linear copy_key_;
  nn::Linear gate_;
};

}  // namespace freetalky::gec

#include "freetalky/gec/model.hpp"

#include "freetalky/nn/checkpoint.hpp"

#include <cmath>

namespace freetalky::gec {

using text::Vocabulary;

GecModel::GecModel(GecConfig config, Vocabulary vocab, std::uint64_t seed) : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const Eigen::Index d = config_.embedding_dim;
  token_embedding_ = params_.add("token_embedding", nn::random_normal(vocab_.size(), d, 0.1, rng));
  position_embedding_ = params_.add("position_embedding", nn::random_normal(config_.max_positions, d, 0.1, rng));
  for (int l = 0; l < config_.num_layers; ++l)
    encoder_.push_back(nn::TransformerBlock::create(params_, "encoder" + std::to_string(l), d, config_.num_heads,
                                                    config_.feedforward_dim, false, false, config_.num_layers, rng));
  encoder_norm_ = nn::LayerNorm::create(params_, "encoder_norm", d);
  for (int l = 0; l < config_.num_layers; ++l)
    decoder_.push_back(nn::TransformerBlock::create(params_, "decoder" + std::to_string(l), d, config_.num_heads,
                                                    config_.feedforward_dim, true, true, config_.num_layers, rng));
  decoder_norm_ = nn::LayerNorm::create(params_, "decoder_norm", d);
  copy_query_ = nn::Linear::create(params_, "copy_query", d, d, rng);
  copy_key_ = nn::Linear::create(params_, "copy_key", d, d, rng);
  gate_ = nn::Linear::create(params_, "gate", 2 * d, 1, rng);
}

EncodedPair GecModel::encode(std::span<const std::string> source, std::span<const std::string> target) const {
  const auto limit = static_cast<std::size_t>(config_.max_positions);
  if (source.size() + 1 > limit || target.size() + 1 > limit)
    throw SequenceTooLong("sentence needs more than " + std::to_string(limit) + " positions");
  EncodedPair p;
  p.source_tokens.assign(source.begin(), source.end());
  p.source_tokens.push_back(vocab_.token(Vocabulary::kEos));
  const ExtendedVocabulary ext(vocab_, p.source_tokens);
  p.extended_size = ext.size();
  p.encoder_ids = ext.input_ids(p.source_tokens);
  p.source_extended_ids = ext.extended_ids(p.source_tokens);
  p.decoder_ids.push_back(Vocabulary::kBos);
  for (const auto& t : target) {
    p.decoder_ids.push_back(vocab_.id(t));
    p.targets.push_back(ext.id(t));
  }
  p.targets.push_back(Vocabulary::kEos);
  return p;
}

nn::Var GecModel::embed(std::span<const int> ids) const {
  std::vector<int> positions(ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
  return nn::add(nn::embedding(token_embedding_, ids), nn::embedding(position_embedding_, positions));
}

nn::Var GecModel::encode_source(std::span<const int> encoder_ids, std::mt19937_64* dropout_rng) const {
  if (encoder_ids.empty() || encoder_ids.size() > static_cast<std::size_t>(config_.max_positions))
    throw SequenceTooLong("source length outside [1, max_positions]");
  nn::Var h = embed(encoder_ids);
  if (dropout_rng) h = nn::dropout(h, config_.dropout, *dropout_rng);
  for (const auto& block : encoder_) h = block(h, nullptr, config_.dropout, dropout_rng);
  return encoder_norm_(h);
}

GecModel::Output GecModel::decode(const nn::Var& memory, std::span<const int> decoder_ids,
                                  std::span<const int> source_extended_ids, int extended_size,
                                  std::mt19937_64* dropout_rng) const {
  if (decoder_ids.empty() || decoder_ids.size() > static_cast<std::size_t>(config_.max_positions))
    throw SequenceTooLong("target length outside [1, max_positions]");
  if (source_extended_ids.size() != static_cast<std::size_t>(memory.rows()))
    throw std::invalid_argument("source ids do not match the encoded source");
  nn::Var h = embed(decoder_ids);
  if (dropout_rng) h = nn::dropout(h, config_.dropout, *dropout_rng);
  for (const auto& block : decoder_) h = block(h, &memory, config_.dropout, dropout_rng);
  h = decoder_norm_(h);

  Output out;
  out.vocab_dist = nn::softmax_rows(nn::matmul_nt(h, token_embedding_));
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(config_.embedding_dim));
  out.attention = nn::softmax_rows(nn::scale(nn::matmul_nt(copy_query_(h), copy_key_(memory)), inv_sqrt_d));
  const nn::Var context = nn::matmul(out.attention, memory);
  const std::vector<nn::Var> gate_in{h, context};
  out.p_gen = nn::sigmoid(gate_(nn::concat_cols(gate_in)));

  nn::Matrix scatter = nn::Matrix::Zero(memory.rows(), extended_size);
  for (std::size_t i = 0; i < source_extended_ids.size(); ++i) {
    const int id = source_extended_ids[i];
    if (id < 0 || id >= extended_size) throw std::invalid_argument("source id outside the extended vocabulary");
    scatter(static_cast<Eigen::Index>(i), id) = 1.0;
  }
  const nn::Var generated = nn::mul_col(nn::pad_cols(out.vocab_dist, extended_size - vocab_.size()), out.p_gen);
  const nn::Var copied =
      nn::mul_col(nn::matmul(out.attention, nn::Var::constant(std::move(scatter))), nn::affine(out.p_gen, -1.0, 1.0));
  out.mixture = nn::add(generated, copied);
  return out;
}

GecModel::Output GecModel::forward(const EncodedPair& pair, std::mt19937_64* dropout_rng) const {
  return decode(encode_source(pair.encoder_ids, dropout_rng), pair.decoder_ids, pair.source_extended_ids,
                pair.extended_size, dropout_rng);
}

nn::Var GecModel::loss(const EncodedPair& pair, std::mt19937_64* dropout_rng) const {
  return nn::nll_from_probs(forward(pair, dropout_rng).mixture, pair.targets);
}

void GecModel::save(const std::filesystem::path& path) const {
  const nlohmann::json meta = {
      {"config",
       {{"num_layers", config_.num_layers},
        {"num_heads", config_.num_heads},
        {"embedding_dim", config_.embedding_dim},
        {"feedforward_dim", config_.feedforward_dim},
        {"max_positions", config_.max_positions},
        {"beam_size", config_.beam_size},
        {"device_preference", to_string(config_.device_preference)},
        {"edit_ratio_threshold", config_.edit_ratio_threshold},
        {"dropout", config_.dropout}}},
      {"vocab", std::vector<std::string>(vocab_.tokens().begin() + Vocabulary::kSpecialCount, vocab_.tokens().end())}};
  nn::save_checkpoint(path, "gec", meta, params_);
}

GecModel GecModel::load(const std::filesystem::path& path) {
  const auto header = nn::read_checkpoint_header(path);
  if (header.kind != "gec") throw nn::CheckpointError("not a gec checkpoint: " + path.string());
  GecConfig c;
  std::vector<std::string> tokens;
  try {
    const auto& j = header.metadata.at("config");
    c.num_layers = j.at("num_layers");
    c.num_heads = j.at("num_heads");
    c.embedding_dim = j.at("embedding_dim");
    c.feedforward_dim = j.at("feedforward_dim");
    c.max_positions = j.at("max_positions");
    c.beam_size = j.at("beam_size");
    c.device_preference = parse_device(j.at("device_preference"));
    c.edit_ratio_threshold = j.at("edit_ratio_threshold");
    c.dropout = j.at("dropout");
    tokens = header.metadata.at("vocab").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw nn::CheckpointError(std::string("bad gec checkpoint metadata: ") + e.what());
  }
  GecModel model(c, Vocabulary::from_tokens(tokens), 0);
  nn::load_checkpoint_tensors(path, "gec", model.params_);
  return model;
}

}  // namespace freetalky::gec

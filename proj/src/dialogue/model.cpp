#include "freetalky/dialogue/model.hpp"

#include "freetalky/nn/checkpoint.hpp"
#include "freetalky/text/tokenizer.hpp"

namespace freetalky::dialogue {

using text::Vocabulary;

std::vector<std::string> dialogue_tokens(std::string_view text) { return text::tokenize(text, true); }

SerializedInput build_input(const PersonaProfile& persona, std::span<const Turn> history, std::string_view response,
                            const Vocabulary& vocab, int max_positions) {
  if (persona.sentences.empty()) throw EmptyPersona("build_input needs a persona");

  std::vector<int> persona_ids{Vocabulary::kBos};
  for (const auto& s : persona.sentences) {
    const auto ids = vocab.encode(dialogue_tokens(s));
    persona_ids.insert(persona_ids.end(), ids.begin(), ids.end());
  }

  struct Span {
    std::vector<int> ids;
    Segment segment;
  };
  std::vector<Span> turns;
  for (const auto& t : history) {
    const bool user = t.speaker == session::Speaker::User;
    Span s{{user ? Vocabulary::kSpeakerUser : Vocabulary::kSpeakerBot}, user ? Segment::User : Segment::Bot};
    const auto ids = vocab.encode(dialogue_tokens(t.text));
    s.ids.insert(s.ids.end(), ids.begin(), ids.end());
    turns.push_back(std::move(s));
  }

  std::vector<int> response_ids = vocab.encode(dialogue_tokens(response));
  const bool labeled = !response_ids.empty();
  if (labeled) response_ids.push_back(Vocabulary::kEos);

  std::size_t fixed = persona_ids.size() + 1 + response_ids.size();
  if (fixed > static_cast<std::size_t>(max_positions))
    throw InputTooLong("persona and response need " + std::to_string(fixed) + " positions, limit is " +
                       std::to_string(max_positions));
  std::size_t history_len = 0;
  for (const auto& s : turns) history_len += s.ids.size();
  std::size_t first_kept = 0;
  while (fixed + history_len > static_cast<std::size_t>(max_positions)) history_len -= turns[first_kept++].ids.size();

  SerializedInput out;
  auto push = [&out](int id, Segment seg, bool label) {
    out.token_ids.push_back(id);
    out.segment_ids.push_back(static_cast<int>(seg));
    out.lm_label_mask.push_back(label);
  };
  for (int id : persona_ids) push(id, Segment::Persona, false);
  for (std::size_t i = first_kept; i < turns.size(); ++i)
    for (int id : turns[i].ids) push(id, turns[i].segment, false);
  push(Vocabulary::kSpeakerBot, Segment::Bot, false);
  for (int id : response_ids) push(id, Segment::Bot, true);
  return out;
}

DialogueModel::DialogueModel(DialogueModelConfig config, Vocabulary vocab, std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const Eigen::Index d = config_.embedding_dim;
  token_embedding_ = params_.add("token_embedding", nn::random_normal(vocab_.size(), d, 0.1, rng));
  position_embedding_ = params_.add("position_embedding", nn::random_normal(config_.max_positions, d, 0.1, rng));
  segment_embedding_ = params_.add("segment_embedding", nn::random_normal(kSegmentCount, d, 0.1, rng));
  for (int l = 0; l < config_.num_layers; ++l)
    blocks_.push_back(nn::TransformerBlock::create(params_, "block" + std::to_string(l), d, config_.num_heads,
                                                   config_.feedforward_dim, true, false, config_.num_layers, rng));
  final_norm_ = nn::LayerNorm::create(params_, "final_norm", d);
  mc_head_ = nn::Linear::create(params_, "mc_head", d, 1, rng);
}

DialogueModel::Output DialogueModel::forward(const SerializedInput& input, std::mt19937_64* dropout_rng) const {
  if (input.size() == 0) throw DialogueError("empty input");
  if (input.size() > static_cast<std::size_t>(config_.max_positions)) throw InputTooLong("input exceeds max_positions");
  std::vector<int> positions(input.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);

  nn::Var h = nn::add(nn::add(nn::embedding(token_embedding_, input.token_ids), nn::embedding(position_embedding_, positions)),
                      nn::embedding(segment_embedding_, input.segment_ids));
  if (dropout_rng) h = nn::dropout(h, config_.dropout, *dropout_rng);
  for (const auto& block : blocks_) h = block(h, nullptr, config_.dropout, dropout_rng);
  h = final_norm_(h);
  return {nn::matmul_nt(h, token_embedding_), mc_head_(nn::row(h, h.rows() - 1))};
}

void DialogueModel::save(const std::filesystem::path& path) const {
  const nlohmann::json meta = {{"config",
                                {{"num_layers", config_.num_layers},
                                 {"num_heads", config_.num_heads},
                                 {"embedding_dim", config_.embedding_dim},
                                 {"feedforward_dim", config_.feedforward_dim},
                                 {"max_positions", config_.max_positions},
                                 {"lm_loss_weight", config_.lm_loss_weight},
                                 {"mc_loss_weight", config_.mc_loss_weight},
                                 {"dropout", config_.dropout}}},
                               {"vocab", std::vector<std::string>(vocab_.tokens().begin() + Vocabulary::kSpecialCount,
                                                                  vocab_.tokens().end())}};
  nn::save_checkpoint(path, "dialogue", meta, params_);
}

DialogueModel DialogueModel::load(const std::filesystem::path& path) {
  const auto header = nn::read_checkpoint_header(path);
  if (header.kind != "dialogue") throw nn::CheckpointError("not a dialogue checkpoint: " + path.string());
  DialogueModelConfig c;
  try {
    const auto& j = header.metadata.at("config");
    c.num_layers = j.at("num_layers");
    c.num_heads = j.at("num_heads");
    c.embedding_dim = j.at("embedding_dim");
    c.feedforward_dim = j.at("feedforward_dim");
    c.max_positions = j.at("max_positions");
    c.lm_loss_weight = j.at("lm_loss_weight");
    c.mc_loss_weight = j.at("mc_loss_weight");
    c.dropout = j.at("dropout");
  } catch (const nlohmann::json::exception& e) {
    throw nn::CheckpointError(std::string("bad dialogue checkpoint config: ") + e.what());
  }
  const auto tokens = header.metadata.at("vocab").get<std::vector<std::string>>();
  DialogueModel model(c, Vocabulary::from_tokens(tokens), 0);
  nn::load_checkpoint_tensors(path, "dialogue", model.params_);
  return model;
}

}  // namespace freetalky::dialogue

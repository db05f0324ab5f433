#include "freetalky/gec/correct.hpp"

#include "freetalky/gec/edits.hpp"
#include "freetalky/text/tokenizer.hpp"

#include <algorithm>
#include <cmath>

namespace freetalky::gec {

using text::Vocabulary;

namespace {

struct Live {
  std::vector<int> decoder_ids;  // <bos> + emitted, extension ids as <unk>
  std::vector<int> emitted;      // extended ids
  double log_prob = 0.0;
};

bool banned(int id) {
  return id == Vocabulary::kPad || id == Vocabulary::kUnk || id == Vocabulary::kBos ||
         id == Vocabulary::kSpeakerUser || id == Vocabulary::kSpeakerBot;
}

bool better(const Hypothesis& a, const std::string& a_text, const Hypothesis& b, const std::string& b_text) {
  if (a.normalized() != b.normalized()) return a.normalized() > b.normalized();
  return a_text < b_text;
}

}  // namespace

std::vector<Hypothesis> beam_search(const GecModel& model, std::span<const std::string> source, int beam_size) {
  if (beam_size <= 0) throw GecError("beam_size must be positive");
  nn::NoGradGuard no_grad;
  const EncodedPair pair = model.encode(source, {});
  const ExtendedVocabulary ext(model.vocab(), pair.source_tokens);
  const nn::Var memory = model.encode_source(pair.encoder_ids);
  const int max_len = std::min(model.config().max_positions - 1, static_cast<int>(source.size()) + 8);

  std::vector<Live> beams{{{Vocabulary::kBos}, {}, 0.0}};
  std::vector<Hypothesis> finished;
  for (int step = 0; step <= max_len && !beams.empty(); ++step) {
    struct Candidate {
      std::size_t beam;
      int id;
      double log_prob;
    };
    std::vector<Candidate> candidates;
    for (std::size_t b = 0; b < beams.size(); ++b) {
      const auto out = model.decode(memory, beams[b].decoder_ids, pair.source_extended_ids, pair.extended_size);
      const Eigen::Index last = out.vocab_dist.rows() - 1;
      const nn::Matrix vocab_row = out.vocab_dist.value().row(last);
      const nn::Matrix attn_row = out.attention.value().row(last);
      const auto mixture =
          copy_mixture_distribution(std::span<const double>(vocab_row.data(), static_cast<std::size_t>(vocab_row.size())),
                                    std::span<const double>(attn_row.data(), static_cast<std::size_t>(attn_row.size())),
                                    out.p_gen.value()(last, 0), pair.source_tokens, ext);
      const bool must_end = step == max_len;
      std::vector<Candidate> local;
      for (std::size_t id = 0; id < mixture.size(); ++id) {
        const int i = static_cast<int>(id);
        if (banned(i) || mixture[id] <= 0.0) continue;
        if (must_end && i != Vocabulary::kEos) continue;
        local.push_back({b, i, beams[b].log_prob + std::log(mixture[id])});
      }
      const std::size_t keep = std::min<std::size_t>(local.size(), static_cast<std::size_t>(beam_size));
      std::partial_sort(local.begin(), local.begin() + static_cast<std::ptrdiff_t>(keep), local.end(),
                        [](const Candidate& x, const Candidate& y) { return x.log_prob > y.log_prob; });
      candidates.insert(candidates.end(), local.begin(), local.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.log_prob > y.log_prob; });

    // The best beam_size extensions survive; those ending in <eos> finish
    // and the beam shrinks accordingly.
    std::vector<Live> next;
    const std::size_t take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(beam_size));
    for (std::size_t k = 0; k < take; ++k) {
      const auto& c = candidates[k];
      const Live& parent = beams[c.beam];
      if (c.id == Vocabulary::kEos) {
        Hypothesis h;
        for (int id : parent.emitted) h.tokens.push_back(ext.token(id));
        h.log_prob = c.log_prob;
        finished.push_back(std::move(h));
        continue;
      }
      Live child = parent;
      child.emitted.push_back(c.id);
      child.decoder_ids.push_back(ext.is_extension(c.id) ? Vocabulary::kUnk : c.id);
      child.log_prob = c.log_prob;
      next.push_back(std::move(child));
    }
    beams = std::move(next);
  }

  std::vector<std::pair<std::string, Hypothesis>> ranked;
  for (auto& h : finished) ranked.emplace_back(text::detokenize(h.tokens), std::move(h));
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return better(a.second, a.first, b.second, b.first); });
  std::vector<Hypothesis> out;
  for (auto& [_, h] : ranked) out.push_back(std::move(h));
  return out;
}

GecResult correct(const GecModel& model, std::string_view sentence, int beam_size) {
  const std::string source = text::trim(sentence);
  const auto tokens = gec_tokens(source);
  if (tokens.empty()) throw GecError("cannot correct an empty sentence");
  GecResult result{source, source, {}, false};
  std::vector<Hypothesis> hyps;
  try {
    hyps = beam_search(model, tokens, beam_size > 0 ? beam_size : model.config().beam_size);
  } catch (const SequenceTooLong&) {
    return result;
  }
  if (hyps.empty() || hyps.front().tokens.empty()) return result;
  result.correction = text::detokenize(hyps.front().tokens);
  result.edits = extract_edits(tokens, hyps.front().tokens);
  result.emit = overcorrection_gate(result.source, result.correction, model.config().edit_ratio_threshold);
  return result;
}

std::vector<GecResult> batch_corrections(const Corrector& corrector, std::span<const session::Turn> user_turns) {
  std::vector<GecResult> out;
  for (const auto& turn : user_turns) {
    if (turn.speaker != session::Speaker::User) continue;
    for (const auto& sentence : split_sentences(turn.text)) {
      GecResult r = corrector.correct(sentence);
      if (r.emit) out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<std::string> batch_feedback(const Corrector& corrector, std::span<const session::Turn> user_turns) {
  std::vector<std::string> out;
  for (const auto& r : batch_corrections(corrector, user_turns)) out.push_back(format_feedback(r));
  return out;
}

}  // namespace freetalky::gec

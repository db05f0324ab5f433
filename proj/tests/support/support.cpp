#include "support.hpp"

#include "freetalky/dialogue/losses.hpp"
#include "freetalky/gec/edits.hpp"
#include "freetalky/text/tokenizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <unistd.h>

namespace freetalky::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("freetalky-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

GradCheckResult gradient_check(const nn::ParameterSet& params, const std::function<nn::Var()>& loss, std::size_t per_tensor,
                               std::mt19937_64& rng, double h) {
  const_cast<nn::ParameterSet&>(params).zero_grad();
  loss().backward();

  GradCheckResult result;
  for (const auto& [name, var] : params.entries()) {
    nn::Var p = var;
    const nn::Matrix analytic = p.grad();
    const auto n = static_cast<std::size_t>(p.value().size());
    std::vector<std::size_t> picks(n);
    std::iota(picks.begin(), picks.end(), 0);
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(std::min(per_tensor, n));

    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t flat : picks) {
      double& x = p.mutable_value().data()[flat];
      const double saved = x;
      x = saved + h;
      const double up = loss().item();
      x = saved - h;
      const double down = loss().item();
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[flat];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    result.checked_entries += picks.size();
    const double scale = std::sqrt(std::max(a2, n2));
    // Key biases cancel inside the softmax, so their gradient is rounding noise
    // on both sides; compare those absolutely.
    const double rel = scale < 1e-7 ? std::sqrt(diff2) : std::sqrt(diff2) / scale;
    if (rel >= result.worst_relative_error) {
      result.worst_relative_error = rel;
      result.worst_tensor = name;
    }
  }
  const_cast<nn::ParameterSet&>(params).zero_grad();
  return result;
}

namespace {

std::size_t brute(const std::vector<std::string>& a, std::size_t i, const std::vector<std::string>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const std::size_t diag = brute(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  const std::size_t del = brute(a, i + 1, b, j) + 1;
  const std::size_t ins = brute(a, i, b, j + 1) + 1;
  return std::min({diag, del, ins});
}

}  // namespace

std::size_t brute_force_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return brute(a, 0, b, 0);
}

gec::GecResult TableCorrector::correct(std::string_view sentence) const {
  ++calls;
  if (text::trim(sentence).empty()) throw gec::GecError("empty sentence");
  gec::GecResult r;
  r.source = std::string(sentence);
  const auto it = table_.find(r.source);
  r.correction = it == table_.end() ? r.source : it->second;
  r.edits = gec::extract_edits(r.source, r.correction);
  r.emit = gec::overcorrection_gate(r.source, r.correction);
  return r;
}

}  // namespace freetalky::testing

namespace freetalky::testing {

namespace {

struct Utterance {
  const char* text;
  bool blank;
  bool ends;
  bool affirmative;
};

// Labels written by hand from the lifecycle rules.
constexpr Utterance kUtterances[] = {
    {"Bye.", false, true, false},
    {"bye", false, true, false},
    {"Okay.. It’s nice to meet you. Bye.", false, true, true},
    {"Goodbye!", false, true, false},
    {"Bye. See you", false, false, false},
    {"byebye", false, false, false},
    {"Hi how are you?", false, false, false},
    {"I want visit Colorado.", false, false, false},
    {"Yes please.", false, false, true},
    {"yeah", false, false, true},
    {"Sure!", false, false, true},
    {"no thanks", false, false, false},
    {"not now", false, false, false},
    {"   ", true, false, false},
    {"", true, false, false},
};

}  // namespace

std::string session_property_violation(std::uint64_t seed, int sequences, int steps_per_sequence) {
  using session::SessionPhase;
  std::mt19937_64 rng(seed);
  const std::vector<session::PersonaProfile> catalog = {{1, {"I like tea."}}, {2, sample_chat::kPersona}, {3, {"I swim."}}};
  const auto describe = [](int seq, int step, const std::string& what) {
    return "sequence " + std::to_string(seq) + " step " + std::to_string(step) + ": " + what;
  };

  for (int seq = 0; seq < sequences; ++seq) {
    session::Session s = session::create_session();
    bool consented = false;
    for (int step = 0; step < steps_per_sequence; ++step) {
      const SessionPhase before = s.phase;
      const int op = std::uniform_int_distribution<int>(0, 4)(rng);
      std::optional<SessionPhase> expected;  // nullopt: must throw
      std::optional<session::Session> next;
      bool deliver_event = false;
      bool ask_event = false;
      std::string label;
      try {
        if (op == 0) {
          const int choice = std::uniform_int_distribution<int>(0, 4)(rng);
          label = "choose " + std::to_string(choice);
          if (before == SessionPhase::AwaitingPersonaChoice && choice >= 1 && choice <= 3)
            expected = SessionPhase::Conversing;
          next = session::choose_persona(s, choice, catalog);
        } else if (op <= 2) {
          const auto& u = kUtterances[std::uniform_int_distribution<std::size_t>(0, std::size(kUtterances) - 1)(rng)];
          label = std::string("advance \"") + u.text + "\"";
          if (!u.blank && before == SessionPhase::Conversing)
            expected = u.ends ? SessionPhase::AwaitingFeedbackConsent : SessionPhase::Conversing;
          if (!u.blank && before == SessionPhase::AwaitingFeedbackConsent)
            expected = u.affirmative ? SessionPhase::DeliveringFeedback : SessionPhase::Ended;
          auto adv = session::advance(s, u.text);
          deliver_event = adv.event.kind == session::EventKind::DeliverFeedback;
          ask_event = adv.event.kind == session::EventKind::AskConsent;
          if (deliver_event && !(before == SessionPhase::AwaitingFeedbackConsent && u.affirmative))
            return describe(seq, step, "feedback offered without consent");
          if (before == SessionPhase::Conversing && u.ends && !ask_event)
            return describe(seq, step, "end command did not ask for consent");
          next = std::move(adv.session);
        } else if (op == 3) {
          label = "append_reply";
          if (before == SessionPhase::Conversing) expected = SessionPhase::Conversing;
          next = session::append_reply(s, "That is nice.");
        } else {
          label = "deliver_feedback";
          if (before == SessionPhase::DeliveringFeedback) expected = SessionPhase::Ended;
          const std::vector<std::string> none;
          next = session::deliver_feedback(s, none);
          if (!consented) return describe(seq, step, "feedback delivered without consent");
        }
      } catch (const session::SessionError&) {
        if (expected) return describe(seq, step, label + " threw in phase " + std::string(to_string(before)));
        continue;
      }
      if (!expected) return describe(seq, step, label + " accepted in phase " + std::string(to_string(before)));
      if (next->phase != *expected)
        return describe(seq, step, label + " reached " + std::string(to_string(next->phase)));
      if (next->phase != before && !session::is_legal_transition(before, next->phase))
        return describe(seq, step, label + " made an illegal transition");
      if (deliver_event) consented = true;
      s = std::move(*next);
    }
    for (std::size_t i = 1; i < s.turns.size(); ++i) {
      const auto a = s.turns[i - 1].phase, b = s.turns[i].phase;
      if (a != b && !session::is_legal_transition(a, b)) return describe(seq, -1, "turn phases out of order");
    }
  }
  return {};
}

}  // namespace freetalky::testing

namespace freetalky::testing {

std::size_t edit_round_trip_failures(std::uint64_t seed, int pairs, int max_len) {
  static const std::vector<std::string> kAlphabet = {"I", "want", "to", "visit", "a", "the", ".", "?"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(0, max_len);
  std::uniform_int_distribution<std::size_t> word(0, kAlphabet.size() - 1);
  const auto draw = [&] {
    std::vector<std::string> out(static_cast<std::size_t>(length(rng)));
    for (auto& w : out) w = kAlphabet[word(rng)];
    return out;
  };
  std::size_t failures = 0;
  for (int i = 0; i < pairs; ++i) {
    const auto a = draw();
    const auto b = draw();
    try {
      const auto edits = gec::extract_edits(a, b);
      if (gec::apply_edits(edits, a) != b || edits.size() != brute_force_edit_distance(a, b)) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return failures;
}

double copy_mixture_worst_sum_error(std::uint64_t seed, int trials) {
  const std::vector<std::string> words = {"i", "want", "to", "visit", "colorado", "."};
  const auto base = text::Vocabulary::from_tokens(words);
  const std::vector<std::string> pool = {"i", "want", "visit", "Zanzibar", "Quito", ".", "to"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto random_dist = [&](std::size_t n) {
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& x : p) total += (x = -std::log(1.0 - unit(rng)));
    for (auto& x : p) x /= total;
    return p;
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::string> source(1 + rng() % 8);
    for (auto& w : source) w = pool[rng() % pool.size()];
    const gec::ExtendedVocabulary ext(base, source);
    const auto vocab = random_dist(static_cast<std::size_t>(base.size()));
    const auto attention = random_dist(source.size());
    const double gate = t % 10 == 0 ? static_cast<double>(t % 20 == 0) : unit(rng);
    const auto mix = gec::copy_mixture_distribution(vocab, attention, gate, source, ext);
    worst = std::max(worst, std::abs(std::accumulate(mix.begin(), mix.end(), 0.0) - 1.0));
  }
  return worst;
}

GradCheckResult gec_copy_gradient_check(int layers, std::uint64_t seed) {
  gec::GecConfig config;
  config.num_layers = layers;
  config.num_heads = 2;
  config.embedding_dim = 8;
  config.feedforward_dim = 16;
  config.max_positions = 16;
  const std::vector<std::string> words = {"I", "want", "to", "visit", "."};
  gec::GecModel model(config, text::Vocabulary::from_tokens(words), seed);
  std::mt19937_64 rng(seed + 1);
  for (const auto& [name, p] : model.parameters().entries()) {
    nn::Var v = p;
    v.mutable_value() += nn::random_normal(v.rows(), v.cols(), 0.05, rng);
  }
  const std::vector<std::string> source = {"I", "want", "visit", "Zanzibar", "."};
  const std::vector<std::string> target = {"I", "want", "to", "visit", "Zanzibar", "."};
  const auto pair = model.encode(source, target);
  return gradient_check(model.parameters(), [&] { return model.loss(pair); }, 6, rng);
}

}  // namespace freetalky::testing

namespace freetalky::testing {

GradCheckResult dialogue_lm_gradient_check(int layers, std::uint64_t seed) {
  dialogue::DialogueModelConfig config;
  config.num_layers = layers;
  config.num_heads = 2;
  config.embedding_dim = 8;
  config.feedforward_dim = 16;
  config.max_positions = 40;
  const std::vector<std::string> words = {"i", "like", "tea", "do", "you", "?", "yes", ",", "."};
  dialogue::DialogueModel model(config, text::Vocabulary::from_tokens(words), seed);
  std::mt19937_64 rng(seed + 1);
  for (const auto& [name, p] : model.parameters().entries()) {
    nn::Var v = p;
    v.mutable_value() += nn::random_normal(v.rows(), v.cols(), 0.05, rng);
  }
  const session::PersonaProfile persona{0, {"I like tea."}};
  const std::vector<session::Turn> history = {{session::Speaker::User, "Do you like tea?", 0, {}}};
  const auto input = dialogue::build_input(persona, history, "Yes, I like tea.", model.vocab(), config.max_positions);
  return gradient_check(model.parameters(), [&] { return dialogue::lm_loss(model, input); }, 6, rng);
}

}  // namespace freetalky::testing

#include "freetalky/gec/copy.hpp"
#include "freetalky/gec/correct.hpp"
#include "freetalky/gec/edits.hpp"
#include "freetalky/gec/model.hpp"
#include "freetalky/gec/noise.hpp"
#include "freetalky/gec/train.hpp"
#include "freetalky/text/tokenizer.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>

using namespace freetalky::gec;
namespace text = freetalky::text;
namespace session = freetalky::session;
namespace ft = freetalky::testing;
using Tokens = std::vector<std::string>;

namespace {

GecResult emitted(std::string source, std::string correction) {
  GecResult r{std::move(source), std::move(correction), {}, true};
  r.edits = extract_edits(r.source, r.correction);
  return r;
}

std::vector<session::Turn> user_turns(const std::vector<std::string>& texts) {
  std::vector<session::Turn> out;
  for (const auto& t : texts) out.push_back({session::Speaker::User, t, out.size(), session::SessionPhase::Conversing});
  return out;
}

GecConfig small_config() {
  GecConfig c;
  c.num_heads = 2;
  c.embedding_dim = 16;
  c.feedforward_dim = 32;
  return c;
}

}  // namespace

TEST(Edits, InsertExample) {
  const auto edits = extract_edits("I want visit Colorado.", "I want to visit Colorado.");
  ASSERT_EQ(edits.size(), 1u);
  EXPECT_EQ(edits[0], (Edit{EditKind::Insert, 2, "", "to"}));
}

TEST(Edits, ReplaceAndInsertExample) {
  const auto edits = extract_edits("You engineer?", "Are you an engineer?");
  const Tokens src = gec_tokens("You engineer?");
  EXPECT_EQ(apply_edits(edits, src), gec_tokens("Are you an engineer?"));
  const std::vector<Edit> expected = {
      {EditKind::Replace, 0, "You", "Are"}, {EditKind::Insert, 1, "", "you"}, {EditKind::Insert, 1, "", "an"}};
  EXPECT_EQ(edits, expected);
}

TEST(Edits, DeleteExample) {
  const auto edits = extract_edits("I am am happy.", "I am happy.");
  ASSERT_EQ(edits.size(), 1u);
  EXPECT_EQ(edits[0].kind, EditKind::Delete);
  EXPECT_EQ(edits[0].original, "am");
}

TEST(Edits, IdenticalHasNone) { EXPECT_TRUE(extract_edits("Hi how are you?", "Hi how are you?").empty()); }

TEST(Edits, TieBreakPrefersSubstitution) {
  const Tokens a = {"x", "y"};
  const Tokens b = {"y", "x"};
  const auto edits = extract_edits(a, b);
  ASSERT_EQ(edits.size(), 2u);
  EXPECT_EQ(edits[0].kind, EditKind::Replace);
  EXPECT_EQ(edits[1].kind, EditKind::Replace);
}

TEST(Edits, InsertsKeepTargetOrder) {
  const Tokens a = {"b"};
  const Tokens b = {"x", "y", "b"};
  const auto edits = extract_edits(a, b);
  ASSERT_EQ(edits.size(), 2u);
  EXPECT_EQ(edits[0].replacement, "x");
  EXPECT_EQ(edits[1].replacement, "y");
  EXPECT_EQ(apply_edits(edits, a), b);
}

TEST(Edits, ApplyRejectsMismatch) {
  const Tokens src = {"a", "b"};
  const std::vector<Edit> bad = {{EditKind::Replace, 0, "z", "q"}};
  EXPECT_THROW(apply_edits(bad, src), GecError);
  const std::vector<Edit> out_of_range = {{EditKind::Delete, 5, "a", ""}};
  EXPECT_THROW(apply_edits(out_of_range, src), GecError);
}

TEST(Edits, DistanceMatchesBruteForce) {
  std::mt19937_64 rng(4);
  const Tokens alphabet = {"a", "b", "c"};
  for (int i = 0; i < 300; ++i) {
    Tokens a(rng() % 7), b(rng() % 7);
    for (auto& w : a) w = alphabet[rng() % 3];
    for (auto& w : b) w = alphabet[rng() % 3];
    ASSERT_EQ(edit_distance(a, b), ft::brute_force_edit_distance(a, b));
  }
}

TEST(Edits, RandomRoundTrip) { EXPECT_EQ(ft::edit_round_trip_failures(99, 2000, 8), 0u); }

TEST(Gate, Examples) {
  EXPECT_TRUE(overcorrection_gate("I want visit Colorado.", "I want to visit Colorado."));
  EXPECT_TRUE(overcorrection_gate("You engineer?", "Are you an engineer?"));
  EXPECT_FALSE(overcorrection_gate("i see", "I see."));
  EXPECT_FALSE(overcorrection_gate("Hi  how are you", "Hi how are you?"));
  EXPECT_FALSE(overcorrection_gate("I like tea.", "We enjoy coffee a lot."));
}

TEST(Gate, ThresholdBoundary) {
  // Two of four words change: ratio exactly 0.5.
  EXPECT_TRUE(overcorrection_gate("a b c d", "a b x y"));
  EXPECT_FALSE(overcorrection_gate("a b c d", "a x y z"));
  EXPECT_TRUE(overcorrection_gate("a b c d", "a x y z", 0.75));
}

TEST(Feedback, TemplateExamples) {
  EXPECT_EQ(format_feedback(emitted("I want visit Colorado.", "I want to visit Colorado.")),
            ft::sample_chat::kFeedbackColorado);
  EXPECT_EQ(format_feedback(emitted("You engineer?", "Are you an engineer?")), ft::sample_chat::kFeedbackEngineer);
  EXPECT_THROW(format_feedback(GecResult{"a", "b", {}, false}), SuppressedResult);
}

TEST(Sentences, SplitDropsEllipses) {
  EXPECT_EQ(split_sentences("I see. You.. engineer?"), (Tokens{"I see.", "You engineer?"}));
  EXPECT_EQ(split_sentences("Wow... That’s awesome. I am going to study English."),
            (Tokens{"Wow That’s awesome.", "I am going to study English."}));
  EXPECT_EQ(split_sentences("Hi how are you?"), (Tokens{"Hi how are you?"}));
  EXPECT_EQ(split_sentences("no punctuation"), (Tokens{"no punctuation"}));
  EXPECT_TRUE(split_sentences("  ").empty());
}

TEST(Copy, WorkedExample) {
  const Tokens words = {"a", "b", "c", "d"};
  const auto base = text::Vocabulary::from_tokens(words);
  ASSERT_EQ(base.size(), 10);
  const Tokens source = {"a", "Zanzibar"};
  const ExtendedVocabulary ext(base, source);
  ASSERT_EQ(ext.size(), 11);
  const std::vector<double> uniform(10, 0.1);
  const std::vector<double> attention = {0.5, 0.5};
  const auto p = copy_mixture_distribution(uniform, attention, 0.6, source, ext);
  ASSERT_EQ(p.size(), 11u);
  EXPECT_NEAR(p[static_cast<std::size_t>(base.id("a"))], 0.26, 1e-12);
  EXPECT_NEAR(p[static_cast<std::size_t>(ext.id("Zanzibar"))], 0.20, 1e-12);
  EXPECT_NEAR(p[static_cast<std::size_t>(base.id("b"))], 0.06, 1e-12);
}

TEST(Copy, RepeatedSourceWordsAccumulate) {
  const Tokens words = {"x"};
  const auto base = text::Vocabulary::from_tokens(words);
  const Tokens source = {"x", "x", "y"};
  const ExtendedVocabulary ext(base, source);
  std::vector<double> vocab(static_cast<std::size_t>(base.size()), 0.0);
  vocab[0] = 1.0;
  const std::vector<double> attention = {0.25, 0.25, 0.5};
  const auto p = copy_mixture_distribution(vocab, attention, 0.0, source, ext);
  EXPECT_NEAR(p[static_cast<std::size_t>(base.id("x"))], 0.5, 1e-12);
  EXPECT_NEAR(p[static_cast<std::size_t>(ext.id("y"))], 0.5, 1e-12);
}

TEST(Copy, SumsToOne) { EXPECT_LT(ft::copy_mixture_worst_sum_error(5, 1000), 1e-6); }

TEST(Copy, RejectsBadInputs) {
  const Tokens words = {"a"};
  const auto base = text::Vocabulary::from_tokens(words);
  const Tokens source = {"a"};
  const ExtendedVocabulary ext(base, source);
  const std::vector<double> vocab(7, 1.0 / 7);
  const std::vector<double> attention = {1.0};
  EXPECT_THROW(copy_mixture_distribution(vocab, attention, 1.5, source, ext), std::invalid_argument);
  const std::vector<double> short_vocab(3, 1.0 / 3);
  EXPECT_THROW(copy_mixture_distribution(short_vocab, attention, 0.5, source, ext), std::invalid_argument);
  const std::vector<double> bad_attention = {0.3};
  EXPECT_THROW(copy_mixture_distribution(vocab, bad_attention, 0.5, source, ext), std::invalid_argument);
}

TEST(ExtendedVocabulary, Ids) {
  const Tokens words = {"I", "want"};
  const auto base = text::Vocabulary::from_tokens(words);
  const Tokens source = {"I", "Quito", "Quito", "Lima"};
  const ExtendedVocabulary ext(base, source);
  EXPECT_EQ(ext.extension(), (Tokens{"Quito", "Lima"}));
  EXPECT_EQ(ext.id("Quito"), base.size());
  EXPECT_EQ(ext.id("Oslo"), text::Vocabulary::kUnk);
  EXPECT_EQ(ext.input_ids(source)[1], text::Vocabulary::kUnk);
  EXPECT_EQ(ext.extended_ids(source)[3], base.size() + 1);
  EXPECT_EQ(ext.token(base.size() + 1), "Lima");
}

class CopyGradient : public ::testing::TestWithParam<int> {};

TEST_P(CopyGradient, MatchesFiniteDifferences) {
  const auto r = ft::gec_copy_gradient_check(GetParam(), 13);
  EXPECT_LT(r.worst_relative_error, 1e-4) << r.worst_tensor;
}

INSTANTIATE_TEST_SUITE_P(Layers, CopyGradient, ::testing::Values(1, 2));

TEST(Encode, OovTargetsUseExtendedIds) {
  const Tokens words = {"I", "want", "to", "visit", "."};
  GecModel model(small_config(), text::Vocabulary::from_tokens(words), 1);
  const Tokens source = {"I", "want", "visit", "Quito", "."};
  const Tokens target = {"I", "want", "to", "visit", "Quito", ".", "Lima"};
  const auto pair = model.encode(source, target);
  EXPECT_EQ(pair.source_tokens.back(), "<eos>");
  EXPECT_EQ(pair.encoder_ids[3], text::Vocabulary::kUnk);
  EXPECT_EQ(pair.source_extended_ids[3], model.vocab().size());
  EXPECT_EQ(pair.decoder_ids.front(), text::Vocabulary::kBos);
  EXPECT_EQ(pair.targets[4], model.vocab().size());
  EXPECT_EQ(pair.targets[6], text::Vocabulary::kUnk);
  EXPECT_EQ(pair.targets.back(), text::Vocabulary::kEos);
  const Tokens long_source(40, "I");
  EXPECT_THROW(model.encode(long_source, {}), SequenceTooLong);
}

TEST(Model, MixtureRowsAreDistributions) {
  const Tokens words = {"I", "want", "to", "visit", "."};
  GecModel model(small_config(), text::Vocabulary::from_tokens(words), 2);
  const Tokens source = {"I", "want", "visit", "Quito", "."};
  const auto out = model.forward(model.encode(source, source));
  for (Eigen::Index r = 0; r < out.mixture.rows(); ++r) {
    EXPECT_NEAR(out.mixture.value().row(r).sum(), 1.0, 1e-9);
    EXPECT_NEAR(out.attention.value().row(r).sum(), 1.0, 1e-9);
    EXPECT_GE(out.p_gen.value()(r, 0), 0.0);
    EXPECT_LE(out.p_gen.value()(r, 0), 1.0);
  }
}

TEST(Noise, RulesFireWhereTheyMatch) {
  const auto rules = default_noise_rules(1.0);
  ASSERT_EQ(rules.size(), 5u);
  EXPECT_EQ(rules[0].name, "to_deletion");
  const Tokens t = gec_tokens("I want to visit Colorado.");
  const auto sites = rules[0].matches(t);
  ASSERT_EQ(sites, (std::vector<std::size_t>{2}));
  EXPECT_EQ(text::detokenize(rules[0].apply_at(t, 2)), "I want visit Colorado.");
  const Tokens q = gec_tokens("Are you an engineer?");
  EXPECT_EQ(text::detokenize(rules[2].apply_at(q, 0)), "You an engineer?");
  EXPECT_THROW(rules[0].apply_at(t, 0), GecError);
}

TEST(Noise, ZeroProbabilityIsIdentity) {
  const auto rules = default_noise_rules(0.0);
  std::mt19937_64 rng(1);
  for (const auto& s : gen_clean_sentences(50, 3)) EXPECT_EQ(add_noise(s, rules, rng), s);
}

TEST(Noise, CorpusIsDeterministic) {
  const auto clean = gen_clean_sentences(40, 8);
  EXPECT_EQ(clean, gen_clean_sentences(40, 8));
  const auto rules = default_noise_rules(0.5);
  const auto a = gen_noisy_corpus(clean, rules, 2);
  EXPECT_EQ(a, gen_noisy_corpus(clean, rules, 2));
  EXPECT_TRUE(std::any_of(a.begin(), a.end(), [](const auto& p) { return p.noisy != p.clean; }));
  EXPECT_THROW(gen_noisy_corpus(clean, {}, 2), GecError);
}

TEST(Noise, ValidationRejectsIdentityRewrite) {
  NoiseRule r{"bad", 0.5, {{{}, {{"a", "a"}}}}};
  EXPECT_THROW(r.validate(), GecError);
  NoiseRule p{"prob", 1.5, {{{}, {{"a", ""}}}}};
  EXPECT_THROW(p.validate(), GecError);
}

TEST(Noise, CustomNamePools) {
  CleanSentenceOptions opts;
  opts.names = {"Xiomara"};
  opts.places = {"Ouagadougou"};
  int hits = 0;
  for (const auto& s : gen_clean_sentences(200, 1, opts)) {
    hits += s.find("Xiomara") != std::string::npos || s.find("Ouagadougou") != std::string::npos;
    for (const auto& n : default_names()) EXPECT_EQ(s.find(n + " "), std::string::npos) << s;
  }
  EXPECT_GT(hits, 20);
  for (const auto& n : unseen_names())
    EXPECT_EQ(std::find(default_names().begin(), default_names().end(), n), default_names().end());
}

TEST(ParallelCorpus, RoundTripAndErrors) {
  ft::TempDir dir;
  const std::vector<ParallelPair> pairs = {{"I want visit Colorado.", "I want to visit Colorado."}, {"Hi.", "Hi."}};
  write_parallel_corpus(dir / "p.tsv", pairs);
  EXPECT_EQ(read_parallel_corpus(dir / "p.tsv"), pairs);
  std::ofstream(dir / "bad.tsv") << "no tab here\n";
  EXPECT_THROW(read_parallel_corpus(dir / "bad.tsv"), GecError);
  const std::vector<ParallelPair> tabbed = {{"a\tb", "c"}};
  EXPECT_THROW(write_parallel_corpus(dir / "t.tsv", tabbed), GecError);
  EXPECT_THROW(read_parallel_corpus(dir / "missing.tsv"), GecError);
}

TEST(Config, Validation) {
  GecConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beam_size = 0;
  EXPECT_THROW(c.validate(), GecError);
  GecConfig d;
  d.dropout = 1.0;
  EXPECT_THROW(d.validate(), GecError);
  EXPECT_EQ(parse_device("gpu"), Device::Gpu);
  EXPECT_EQ(parse_edit_kind(to_string(EditKind::Delete)), EditKind::Delete);
}

class TrainedSmallModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const std::vector<std::string> clean = {"I want to visit Colorado.", "I am a teacher.", "I want to eat pizza.",
                                            "She is a doctor."};
    for (int rep = 0; rep < 6; ++rep)
      for (const auto& c : clean) pairs_.push_back({c, c});
    pairs_.push_back({"I want visit Colorado.", "I want to visit Colorado."});
    GecTrainOptions opts;
    opts.epochs = 25;
    opts.learning_rate = 5e-3;
    model_ = std::make_shared<GecModel>(train_gec(pairs_, small_config(), opts).model);
  }
  static void TearDownTestSuite() { model_.reset(); }
  static inline std::vector<ParallelPair> pairs_;
  static inline std::shared_ptr<GecModel> model_;
};

TEST_F(TrainedSmallModel, CopiesCleanSentence) {
  const auto r = correct(*model_, "I am a teacher.");
  EXPECT_EQ(r.correction, "I am a teacher.");
  EXPECT_FALSE(r.emit);
  EXPECT_TRUE(r.edits.empty());
}

TEST_F(TrainedSmallModel, BeamIsSortedAndClean) {
  const Tokens src = gec_tokens("I want to eat pizza.");
  const auto hyps = beam_search(*model_, src, 4);
  ASSERT_FALSE(hyps.empty());
  for (std::size_t i = 1; i < hyps.size(); ++i) EXPECT_GE(hyps[i - 1].normalized(), hyps[i].normalized());
  for (const auto& h : hyps)
    for (const auto& t : h.tokens) {
      EXPECT_NE(t, "<unk>");
      EXPECT_NE(t, "<pad>");
    }
  EXPECT_THROW(beam_search(*model_, src, 0), GecError);
}

TEST_F(TrainedSmallModel, SaveLoadGivesIdenticalCorrections) {
  ft::TempDir dir;
  model_->save(dir / "g.ckpt");
  const auto loaded = GecModel::load(dir / "g.ckpt");
  EXPECT_EQ(loaded.parameters().snapshot(), model_->parameters().snapshot());
  EXPECT_EQ(loaded.config().embedding_dim, 16);
  for (const auto& p : pairs_) EXPECT_EQ(correct(loaded, p.noisy), correct(*model_, p.noisy));
}

TEST_F(TrainedSmallModel, EmptySentenceThrows) { EXPECT_THROW(correct(*model_, "  "), GecError); }

TEST(Training, RejectsEmptyCorpus) {
  EXPECT_THROW(train_gec({}, small_config(), {}), GecError);
}

TEST(Training, VocabularyMinCount) {
  const std::vector<ParallelPair> pairs = {{"I like tea.", "I like tea."}, {"I like Quito.", "I like Lima."}};
  const auto v = build_gec_vocab(pairs, 2);
  EXPECT_TRUE(v.contains("like"));
  EXPECT_FALSE(v.contains("Quito"));
}

TEST(Batch, FeedbackFollowsTurnAndSentenceOrder) {
  ft::TableCorrector corrector(ft::sample_chat::kCorrections);
  const auto turns = user_turns(ft::sample_chat::kUserTurns);
  const auto feedback = batch_feedback(corrector, turns);
  EXPECT_EQ(feedback, (Tokens{ft::sample_chat::kFeedbackColorado, ft::sample_chat::kFeedbackEngineer}));
  // One call per sentence: 1 + 2 + 2 + 2 + 2.
  EXPECT_EQ(corrector.calls, 9);
}

TEST(Batch, SkipsSystemTurnsAndSuppressed) {
  ft::TableCorrector corrector({{"I like tea.", "I like tea!"}, {"You engineer?", "Are you an engineer?"}});
  auto turns = user_turns({"I like tea.", "You engineer?"});
  turns[1].speaker = session::Speaker::System;
  EXPECT_TRUE(batch_feedback(corrector, turns).empty());
}

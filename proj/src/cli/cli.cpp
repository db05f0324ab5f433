#include "freetalky/cli/cli.hpp"

#include "freetalky/analytics/survey.hpp"
#include "freetalky/dialogue/evaluate.hpp"
#include "freetalky/dialogue/synthetic.hpp"
#include "freetalky/dialogue/train.hpp"
#include "freetalky/gec/correct.hpp"
#include "freetalky/gec/train.hpp"
#include "freetalky/service/orchestrator.hpp"
#include "freetalky/service/server.hpp"
#include "freetalky/speech/speech.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iomanip>
#include <iostream>
#include <set>

namespace freetalky::cli {

namespace {

const std::set<std::string> kSubcommands = {"serve",      "chat", "train-dialogue", "train-gec",
                                            "gen-corpus", "eval", "analyze-survey"};

std::string usage() {
  return "usage: freetalky <command> [options]\n"
         "commands:\n"
         "  serve            run the HTTP service\n"
         "  chat             tutoring session on the terminal\n"
         "  train-dialogue   train the persona dialogue model\n"
         "  train-gec        train the grammar correction model\n"
         "  gen-corpus       write a synthetic dialogue or gec corpus\n"
         "  eval             evaluate checkpoints (hits@1, perplexity, exact match)\n"
         "  analyze-survey   Likert summary and Spearman matrix of a survey CSV\n"
         "run 'freetalky <command> --help' for options\n";
}

struct ServiceFlags {
  std::string config;
  std::string dialogue;
  std::string gec;
  std::string gec_url;
  std::string personas;
  std::string lexicon;
  std::string journal;
  std::string listen;
  std::int64_t seed = -1;

  void add_to(CLI::App& app) {
    app.add_option("--config", config, "service config JSON");
    app.add_option("--dialogue", dialogue, "dialogue checkpoint");
    app.add_option("--gec", gec, "gec checkpoint (in-process mode)");
    app.add_option("--gec-url", gec_url, "remote gec base URL (remote mode)");
    app.add_option("--personas", personas, "persona catalog JSON");
    app.add_option("--lexicon", lexicon, "offensive word list");
    app.add_option("--seed", seed, "generation seed");
  }

  service::ServiceConfig resolve(const CliContext& ctx) const {
    auto c = service::load_service_config(config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config),
                                          ctx.env);
    if (!dialogue.empty()) c.dialogue_checkpoint = dialogue;
    if (!gec.empty()) {
      c.gec_checkpoint = gec;
      c.gec_mode = service::GecMode::InProcess;
    }
    if (!gec_url.empty()) {
      c.gec_url = gec_url;
      c.gec_mode = service::GecMode::Remote;
    }
    if (!personas.empty()) c.persona_catalog_path = personas;
    if (!lexicon.empty()) c.lexicon_path = lexicon;
    if (!journal.empty()) c.journal_path = journal;
    if (!listen.empty()) service::apply_env_overrides(c, [&](const std::string& key) -> std::optional<std::string> {
        if (key == std::string(service::kEnvPrefix) + "LISTEN") return listen;
        return std::nullopt;
      });
    if (seed >= 0) c.rng_seed = static_cast<std::uint64_t>(seed);
    if (c.persona_catalog_path.empty()) c.persona_catalog_path = ctx.data_dir / "personas.json";
    if (c.lexicon_path.empty()) c.lexicon_path = ctx.data_dir / "offensive_words.txt";
    c.validate();
    return c;
  }
};

sigset_t termination_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  return set;
}

int run_serve(const ServiceFlags& flags, CliContext& ctx) {
  const auto config = flags.resolve(ctx);
  auto components = service::load_components(config);
  if (!components.replies) ctx.err << "warning: dialogue model not loaded\n";
  if (!components.corrector) ctx.err << "warning: gec model not loaded\n";
  service::Orchestrator orchestrator(config, std::move(components));
  // Block the signals before any thread starts so only sigwait sees them.
  const sigset_t signals = termination_signals();
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  service::HttpServer server(orchestrator);
  const int port = server.start(config.listen_host, config.listen_port);
  ctx.out << "listening on " << config.listen_host << ":" << port << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  ctx.out << "stopped" << std::endl;
  return kExitOk;
}

struct ChatFlags {
  int persona = 0;
  std::string tts_dir;
  std::string voice = "neutral";
  std::string stt_manifest;
};

int run_chat(const ServiceFlags& flags, const ChatFlags& chat, CliContext& ctx) {
  const auto config = flags.resolve(ctx);
  auto components = service::load_components(config);
  if (!components.replies) throw std::runtime_error("dialogue checkpoint is required for chat");
  if (!components.corrector) throw std::runtime_error("gec checkpoint or url is required for chat");
  service::Orchestrator orchestrator(config, std::move(components));

  std::optional<speech::FixtureStt> stt;
  if (!chat.stt_manifest.empty()) stt = speech::FixtureStt::load(chat.stt_manifest);
  const auto style = speech::parse_voice_style(chat.voice);
  const speech::ToneTts tts;
  if (!chat.tts_dir.empty()) std::filesystem::create_directories(chat.tts_dir);
  int spoken = 0;
  auto say = [&](const std::string& text) {
    if (text.empty()) return;
    ctx.out << "NAO: " << text << "\n";
    if (!chat.tts_dir.empty()) {
      std::ostringstream name;
      name << std::setw(3) << std::setfill('0') << spoken++ << ".wav";
      speech::write_wav(std::filesystem::path(chat.tts_dir) / name.str(), tts.synthesize(text, style));
    }
  };
  // One user utterance per line; with an STT manifest each line names a WAV file.
  auto listen = [&]() -> std::optional<std::string> {
    std::string line;
    while (std::getline(ctx.in, line)) {
      if (line.empty()) continue;
      if (!stt) return line;
      const auto heard = stt->transcribe(speech::read_wav(line));
      ctx.out << "User: " << heard << "\n";
      return heard;
    }
    return std::nullopt;
  };

  const auto created = orchestrator.create_session();
  const std::string id = created.at("session_id");
  say(created.at("greeting"));
  nlohmann::json choice = chat.persona;
  if (chat.persona == 0) {
    const auto line = listen();
    if (!line) return kExitOk;
    choice = *line;
  }
  for (;;) {
    try {
      say(orchestrator.set_persona(id, {{"choice", choice}}).at("persona_intro"));
      break;
    } catch (const service::ApiError& e) {
      if (e.status() != 422) throw;
      ctx.out << "NAO: Please choose a number between 1 and 3.\n";
      const auto line = listen();
      if (!line) return kExitOk;
      choice = *line;
    }
  }
  while (const auto line = listen()) {
    nlohmann::json res;
    try {
      res = orchestrator.utterance(id, {{"text", *line}});
    } catch (const service::ApiError& e) {
      if (e.status() != 422) throw;
      continue;
    }
    say(res.at("reply"));
    if (res.at("phase") == "Ended") break;
  }
  return kExitOk;
}

struct TrainDialogueFlags {
  std::string corpus;
  int synthetic = 250;
  int turns = 3;
  std::string out;
  int epochs = 10;
  std::uint64_t seed = 7;
  double lr = 3e-3;
  int layers = 2;
  int dim = 48;
};

std::vector<dialogue::DialogueExample> dialogue_corpus(const std::string& path, int personas, int turns,
                                                       std::uint64_t seed) {
  if (!path.empty()) return dialogue::read_corpus(path);
  return dialogue::gen_synthetic_dialogue(personas, turns, seed);
}

int run_train_dialogue(const TrainDialogueFlags& f, CliContext& ctx) {
  const auto corpus = dialogue_corpus(f.corpus, f.synthetic, f.turns, f.seed);
  dialogue::DialogueModelConfig config;
  config.num_layers = f.layers;
  config.embedding_dim = f.dim;
  config.feedforward_dim = 2 * f.dim;
  dialogue::DialogueTrainOptions options;
  options.epochs = f.epochs;
  options.seed = f.seed;
  options.learning_rate = f.lr;
  options.on_epoch = [&](int epoch, double loss) { ctx.out << "epoch " << epoch + 1 << " loss " << loss << std::endl; };
  auto result = dialogue::train_dialogue(corpus, config, options);
  result.model.save(f.out);
  ctx.out << "saved " << f.out << "\n";
  return kExitOk;
}

struct TrainGecFlags {
  std::string corpus;
  int synthetic = 500;
  double noise = 0.4;
  std::string out;
  int epochs = 40;
  std::uint64_t seed = 7;
  double lr = 2e-3;
  int layers = 1;
  int dim = 64;
};

std::vector<gec::ParallelPair> synthetic_pairs(int count, std::uint64_t seed, double noise) {
  const auto clean = gec::gen_clean_sentences(count, seed);
  return gec::gen_noisy_corpus(clean, gec::default_noise_rules(noise), seed + 1);
}

int run_train_gec(const TrainGecFlags& f, CliContext& ctx) {
  const auto pairs = f.corpus.empty() ? synthetic_pairs(f.synthetic, f.seed, f.noise) : gec::read_parallel_corpus(f.corpus);
  gec::GecConfig config;
  config.num_layers = f.layers;
  config.embedding_dim = f.dim;
  config.feedforward_dim = 2 * f.dim;
  gec::GecTrainOptions options;
  options.epochs = f.epochs;
  options.seed = f.seed;
  options.learning_rate = f.lr;
  options.on_epoch = [&](int epoch, double loss) { ctx.out << "epoch " << epoch + 1 << " loss " << loss << std::endl; };
  auto result = gec::train_gec(pairs, config, options);
  result.model.save(f.out);
  ctx.out << "saved " << f.out << "\n";
  return kExitOk;
}

struct GenCorpusFlags {
  std::string kind;
  std::string out;
  int count = 0;
  int turns = 3;
  std::uint64_t seed = 1;
  double noise = 0.4;
};

int run_gen_corpus(const GenCorpusFlags& f, CliContext& ctx) {
  if (f.kind == "dialogue") {
    const auto corpus = dialogue::gen_synthetic_dialogue(f.count > 0 ? f.count : 250, f.turns, f.seed);
    dialogue::write_corpus(f.out, corpus);
    ctx.out << "wrote " << corpus.size() << " dialogue examples to " << f.out << "\n";
  } else {
    const auto pairs = synthetic_pairs(f.count > 0 ? f.count : 500, f.seed, f.noise);
    gec::write_parallel_corpus(f.out, pairs);
    ctx.out << "wrote " << pairs.size() << " sentence pairs to " << f.out << "\n";
  }
  return kExitOk;
}

struct EvalFlags {
  std::string dialogue;
  std::string corpus;
  int synthetic = 50;
  int turns = 3;
  std::string gec;
  std::string gec_corpus;
  int pairs = 200;
  std::uint64_t seed = 11;
};

int run_eval(const EvalFlags& f, CliContext& ctx) {
  if (f.dialogue.empty() && f.gec.empty()) throw CLI::ValidationError("eval needs --dialogue or --gec");
  ctx.out << std::fixed << std::setprecision(4);
  if (!f.dialogue.empty()) {
    const auto model = dialogue::DialogueModel::load(f.dialogue);
    const auto corpus = dialogue_corpus(f.corpus, f.synthetic, f.turns, f.seed);
    const auto batches = dialogue::candidate_batches(corpus, f.seed);
    const auto inputs = dialogue::gold_inputs(model, corpus);
    ctx.out << "dialogue examples " << corpus.size() << "\n";
    ctx.out << "hits@1 " << dialogue::eval_hits_at_1(model, batches) << "\n";
    ctx.out << "perplexity " << dialogue::eval_perplexity(model, inputs) << "\n";
  }
  if (!f.gec.empty()) {
    const auto model = gec::GecModel::load(f.gec);
    const auto pairs = f.gec_corpus.empty() ? synthetic_pairs(f.pairs, f.seed, 0.4) : gec::read_parallel_corpus(f.gec_corpus);
    std::size_t exact = 0;
    for (const auto& p : pairs) exact += gec::correct(model, p.noisy).correction == p.clean;
    ctx.out << "gec pairs " << pairs.size() << "\n";
    ctx.out << "exact match " << static_cast<double>(exact) / static_cast<double>(pairs.size()) << "\n";
  }
  return kExitOk;
}

int run_analyze_survey(const std::string& csv, CliContext& ctx) {
  const auto responses = analytics::read_survey_csv(csv);
  ctx.out << "respondents " << responses.rows.size() << "\n\n";
  ctx.out << analytics::format_likert_report(analytics::likert_summary(responses)) << "\n";
  ctx.out << analytics::format_correlation_report(analytics::spearman_matrix(responses));
  return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, CliContext& ctx) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    (args.empty() ? ctx.err : ctx.out) << usage();
    return args.empty() ? kExitUsage : kExitOk;
  }
  if (!kSubcommands.count(args[0])) {
    ctx.err << "unknown command '" << args[0] << "'\n" << usage();
    return kExitUsage;
  }

  CLI::App app{"freetalky", "freetalky"};
  app.require_subcommand(1);

  ServiceFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve_flags.add_to(*serve);
  serve->add_option("--listen", serve_flags.listen, "host:port");
  serve->add_option("--journal", serve_flags.journal, "session journal (JSONL)");

  ServiceFlags chat_service;
  ChatFlags chat_flags;
  auto* chat = app.add_subcommand("chat", "tutoring session on the terminal");
  chat_service.add_to(*chat);
  chat->add_option("--persona", chat_flags.persona, "persona number 1..3; asked when omitted")
      ->check(CLI::Range(1, 3));
  chat->add_option("--tts-dir", chat_flags.tts_dir, "write each system utterance as a WAV file here");
  chat->add_option("--voice", chat_flags.voice, "neutral or joyful")->check(CLI::IsMember({"neutral", "joyful"}));
  chat->add_option("--stt-manifest", chat_flags.stt_manifest, "digest/transcript manifest; input lines are WAV paths");

  TrainDialogueFlags td;
  auto* train_dialogue = app.add_subcommand("train-dialogue", "train the persona dialogue model");
  train_dialogue->add_option("--corpus", td.corpus, "JSONL corpus; synthetic when omitted");
  train_dialogue->add_option("--personas", td.synthetic, "synthetic persona count");
  train_dialogue->add_option("--turns", td.turns, "synthetic turns per dialogue");
  train_dialogue->add_option("--out", td.out, "checkpoint path")->required();
  train_dialogue->add_option("--epochs", td.epochs)->check(CLI::PositiveNumber);
  train_dialogue->add_option("--seed", td.seed);
  train_dialogue->add_option("--lr", td.lr)->check(CLI::NonNegativeNumber);
  train_dialogue->add_option("--layers", td.layers)->check(CLI::Range(1, 12));
  train_dialogue->add_option("--dim", td.dim)->check(CLI::PositiveNumber);

  TrainGecFlags tg;
  auto* train_gec = app.add_subcommand("train-gec", "train the grammar correction model");
  train_gec->add_option("--corpus", tg.corpus, "TSV noisy/clean pairs; synthetic when omitted");
  train_gec->add_option("--pairs", tg.synthetic, "synthetic pair count");
  train_gec->add_option("--noise", tg.noise, "per-rule noise probability")->check(CLI::Range(0.0, 1.0));
  train_gec->add_option("--out", tg.out, "checkpoint path")->required();
  train_gec->add_option("--epochs", tg.epochs)->check(CLI::PositiveNumber);
  train_gec->add_option("--seed", tg.seed);
  train_gec->add_option("--lr", tg.lr)->check(CLI::NonNegativeNumber);
  train_gec->add_option("--layers", tg.layers)->check(CLI::Range(1, 12));
  train_gec->add_option("--dim", tg.dim)->check(CLI::PositiveNumber);

  GenCorpusFlags gc;
  auto* gen_corpus = app.add_subcommand("gen-corpus", "write a synthetic corpus");
  gen_corpus->add_option("--kind", gc.kind, "dialogue or gec")->required()->check(CLI::IsMember({"dialogue", "gec"}));
  gen_corpus->add_option("--out", gc.out)->required();
  gen_corpus->add_option("--count", gc.count, "personas (dialogue) or sentences (gec)");
  gen_corpus->add_option("--turns", gc.turns);
  gen_corpus->add_option("--seed", gc.seed);
  gen_corpus->add_option("--noise", gc.noise)->check(CLI::Range(0.0, 1.0));

  EvalFlags ev;
  auto* eval = app.add_subcommand("eval", "evaluate checkpoints");
  eval->add_option("--dialogue", ev.dialogue, "dialogue checkpoint");
  eval->add_option("--corpus", ev.corpus, "dialogue JSONL corpus; synthetic when omitted");
  eval->add_option("--personas", ev.synthetic, "synthetic persona count");
  eval->add_option("--turns", ev.turns);
  eval->add_option("--gec", ev.gec, "gec checkpoint");
  eval->add_option("--gec-corpus", ev.gec_corpus, "TSV noisy/clean pairs; synthetic when omitted");
  eval->add_option("--pairs", ev.pairs, "synthetic pair count")->check(CLI::PositiveNumber);
  eval->add_option("--seed", ev.seed);

  std::string survey_csv;
  auto* survey = app.add_subcommand("analyze-survey", "survey statistics");
  survey->add_option("csv", survey_csv, "CSV with header Q1..Q6")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    ctx.out << app.get_subcommands().front()->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ctx.err << e.what() << "\n" << usage();
    return kExitUsage;
  }

  try {
    if (*serve) return run_serve(serve_flags, ctx);
    if (*chat) return run_chat(chat_service, chat_flags, ctx);
    if (*train_dialogue) return run_train_dialogue(td, ctx);
    if (*train_gec) return run_train_gec(tg, ctx);
    if (*gen_corpus) return run_gen_corpus(gc, ctx);
    if (*eval) return run_eval(ev, ctx);
    if (*survey) return run_analyze_survey(survey_csv, ctx);
  } catch (const CLI::ValidationError& e) {
    ctx.err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace freetalky::cli

#include "freetalky/cli/cli.hpp"
#include "freetalky/speech/speech.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <csignal>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace cli = freetalky::cli;
namespace speech = freetalky::speech;
namespace ft = freetalky::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  cli::CliContext ctx{in, out, err, [](const std::string&) { return std::optional<std::string>(); },
                      FREETALKY_DATA_DIR};
  const int code = cli::cli_dispatch(args, ctx);
  return {code, out.str(), err.str()};
}

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

std::string sample_chat_script() {
  std::string s;
  for (const auto& u : ft::sample_chat::kUserTurns) s += u + "\n";
  return s + ft::sample_chat::kConsentAnswer + "\n";
}

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("unknown command"), std::string::npos);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
}

TEST(Cli, BadFlagsAreUsageErrors) {
  EXPECT_EQ(run({"gen-corpus", "--kind", "poetry", "--out", "/tmp/x"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"train-gec"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"chat", "--persona", "9"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"analyze-survey"}).code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("train-gec"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto r = run({"analyze-survey", "/nonexistent/survey.csv"});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(run({"chat", "--dialogue", "/nonexistent.ckpt"}).code, cli::kExitFailure);
}

TEST(Cli, AnalyzeSurvey) {
  const auto r = run({"analyze-survey", std::string(FREETALKY_DATA_DIR) + "/survey_sample.csv"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("respondents 5"), std::string::npos);
  EXPECT_NE(r.out.find("Q6"), std::string::npos);
}

TEST(Cli, GenCorpusWritesReadableFiles) {
  ft::TempDir dir;
  auto d = run({"gen-corpus", "--kind", "dialogue", "--out", (dir / "d.jsonl").string(), "--count", "4", "--turns", "2"});
  ASSERT_EQ(d.code, cli::kExitOk) << d.err;
  EXPECT_NE(d.out.find("wrote 8 dialogue examples"), std::string::npos);
  auto g = run({"gen-corpus", "--kind", "gec", "--out", (dir / "g.tsv").string(), "--count", "30"});
  ASSERT_EQ(g.code, cli::kExitOk) << g.err;
  std::ifstream in(dir / "g.tsv");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) lines += !line.empty();
  EXPECT_EQ(lines, 30u);
}

class CliWithModels : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<ft::TempDir>();
    const auto d = run({"train-dialogue", "--personas", "6", "--turns", "1", "--epochs", "1", "--layers", "1", "--dim",
                        "16", "--out", dialogue().string()});
    ASSERT_EQ(d.code, cli::kExitOk) << d.err;
    const auto g = run({"train-gec", "--pairs", "40", "--epochs", "1", "--dim", "16", "--out", gec().string()});
    ASSERT_EQ(g.code, cli::kExitOk) << g.err;
  }
  static void TearDownTestSuite() { dir_.reset(); }
  static std::filesystem::path dialogue() { return *dir_ / "dialogue.ckpt"; }
  static std::filesystem::path gec() { return *dir_ / "gec.ckpt"; }
  static std::vector<std::string> model_flags() {
    return {"--dialogue", dialogue().string(), "--gec", gec().string()};
  }
  static inline std::unique_ptr<ft::TempDir> dir_;
};

TEST_F(CliWithModels, ChatRunsToTheEnd) {
  auto args = std::vector<std::string>{"chat", "--persona", "2"};
  for (const auto& f : model_flags()) args.push_back(f);
  const auto r = run(args, sample_chat_script());
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("NAO: Hi, I am NAO.", 0), 0u);
  EXPECT_NE(r.out.find("NAO: Persona setting is done. Let me introduce myself. I live in colorado."), std::string::npos);
  EXPECT_NE(r.out.find("NAO: Conversation is done. Do you want to get grammatical feedback?"), std::string::npos);
  EXPECT_EQ(count_lines_starting(r.out, "NAO: Okay!"), 1u);
  // greeting, intro, four replies, consent question, feedback
  EXPECT_EQ(count_lines_starting(r.out, "NAO: "), 8u);
}

TEST_F(CliWithModels, ChatRepromptsForPersona) {
  auto args = std::vector<std::string>{"chat"};
  for (const auto& f : model_flags()) args.push_back(f);
  const auto r = run(args, "seven\n3\nBye.\nno\n");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(count_lines_starting(r.out, "NAO: Please choose a number between 1 and 3."), 1u);
  EXPECT_NE(r.out.find("graduate student"), std::string::npos);
}

TEST_F(CliWithModels, ChatWithSpeechAdapters) {
  ft::TempDir dir;
  speech::ToneTts tts;
  speech::FixtureStt stt;
  std::string input;
  const std::vector<std::string> said = {"Hi how are you?", "Bye.", "no"};
  for (std::size_t i = 0; i < said.size(); ++i) {
    const auto clip = tts.synthesize(said[i], speech::VoiceStyle::Joyful);
    const auto path = dir / ("in" + std::to_string(i) + ".wav");
    speech::write_wav(path, clip);
    stt.add(clip, said[i]);
    input += path.string() + "\n";
  }
  stt.save(dir / "manifest.tsv");
  auto args = std::vector<std::string>{"chat", "--persona", "1", "--stt-manifest", (dir / "manifest.tsv").string(),
                                       "--tts-dir", (dir / "tts").string(), "--voice", "joyful"};
  for (const auto& f : model_flags()) args.push_back(f);
  const auto r = run(args, input);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(count_lines_starting(r.out, "User: "), 3u);
  EXPECT_NE(r.out.find("User: Hi how are you?"), std::string::npos);
  // greeting, intro, one reply, consent question
  const auto spoken = count_lines_starting(r.out, "NAO: ");
  EXPECT_EQ(spoken, 4u);
  for (std::size_t i = 0; i < spoken; ++i) {
    std::ostringstream name;
    name << std::setw(3) << std::setfill('0') << i << ".wav";
    const auto clip = speech::read_wav(dir / "tts" / name.str());
    EXPECT_FALSE(clip.samples.empty());
  }
}

TEST_F(CliWithModels, EvalReportsMetrics) {
  const auto d = run({"eval", "--dialogue", dialogue().string(), "--personas", "3"});
  ASSERT_EQ(d.code, cli::kExitOk) << d.err;
  EXPECT_NE(d.out.find("hits@1 "), std::string::npos);
  EXPECT_NE(d.out.find("perplexity "), std::string::npos);
  const auto g = run({"eval", "--gec", gec().string(), "--pairs", "10"});
  ASSERT_EQ(g.code, cli::kExitOk) << g.err;
  EXPECT_NE(g.out.find("exact match "), std::string::npos);
}

TEST_F(CliWithModels, ServeAnswersHealthAndStopsOnSigterm) {
  int out_pipe[2];
  ASSERT_EQ(::pipe(out_pipe), 0);
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    const std::string d = dialogue().string(), g = gec().string();
    ::execl(FREETALKY_BINARY, FREETALKY_BINARY, "serve", "--listen", "127.0.0.1:0", "--dialogue", d.c_str(), "--gec",
            g.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  FILE* child_out = ::fdopen(out_pipe[0], "r");
  char buf[256] = {};
  ASSERT_NE(std::fgets(buf, sizeof buf, child_out), nullptr);
  const std::string line(buf);
  ASSERT_EQ(line.rfind("listening on 127.0.0.1:", 0), 0u) << line;
  const int port = std::stoi(line.substr(line.rfind(':') + 1));

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto health = nlohmann::json::parse(res->body);
  EXPECT_EQ(health["status"], "ok");
  EXPECT_EQ(health["models"]["gec"], "loaded");

  ::kill(pid, SIGTERM);
  int status = 0;
  ASSERT_EQ(::waitpid(pid, &status, 0), pid);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  ASSERT_NE(std::fgets(buf, sizeof buf, child_out), nullptr);
  EXPECT_EQ(std::string(buf), "stopped\n");
  std::fclose(child_out);
}

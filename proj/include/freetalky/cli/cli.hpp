#pragma once

#include "freetalky/service/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace freetalky::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CliContext {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  service::EnvLookup env = service::process_env();
  // Default location of personas.json and offensive_words.txt.
  std::filesystem::path data_dir;
};

// `args` excludes the program name. Subcommands: serve, chat, train-dialogue,
// train-gec, gen-corpus, eval, analyze-survey. Returns kExitUsage with usage
// text on unknown subcommands or bad flags, kExitFailure on runtime errors.
int cli_dispatch(const std::vector<std::string>& args, CliContext& ctx);

}  // namespace freetalky::cli

#include "freetalky/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  freetalky::cli::CliContext ctx{std::cin, std::cout, std::cerr};
  ctx.data_dir = FREETALKY_DEFAULT_DATA_DIR;
  return freetalky::cli::cli_dispatch({argv + 1, argv + argc}, ctx);
}

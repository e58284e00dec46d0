#include <iostream>

#include "steamreg/cli/commands.hpp"

int main(int argc, char** argv) {
  return steamreg::cli::run_cli(argc, argv, std::cout, std::cerr);
}

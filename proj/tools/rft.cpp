#include <iostream>
#include <string>
#include <vector>

#include "rft/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rft::cli::run_command(args, std::cout, std::cerr);
}

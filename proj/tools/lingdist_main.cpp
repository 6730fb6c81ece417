#include <iostream>
#include <string>
#include <vector>

#include "lingdist/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lingdist::run_cli(args, std::cout, std::cerr);
}

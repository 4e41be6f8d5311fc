#include <iostream>
#include <string>
#include <vector>

#include "lip4/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lip4::cli::run(args, std::cout, std::cerr);
}

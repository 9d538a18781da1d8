#include <iostream>
#include <string>
#include <vector>

#include "coexist/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return coexist::cli::run(args, std::cout, std::cerr);
}

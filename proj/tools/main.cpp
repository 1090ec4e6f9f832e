#include <iostream>
#include <string>
#include <vector>

#include "specgsa/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return specgsa::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "lumpchain/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lumpchain::cli::run(args, std::cout, std::cerr);
}

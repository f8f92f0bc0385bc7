#include <iostream>
#include <string>
#include <vector>

#include "ggdr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ggdr::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "cpdkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cpdkit::cli::dispatch(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "coordsim/cli.hpp"

int main(int argc, char** argv) {
  coordsim::cli::configure_logging();
  std::vector<std::string> args(argv + 1, argv + argc);
  return coordsim::cli::run(args, std::cout, std::cerr);
}

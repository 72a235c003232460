#include <iostream>

#include "swigid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return swigid::run_cli(args, std::cout, std::cerr);
}

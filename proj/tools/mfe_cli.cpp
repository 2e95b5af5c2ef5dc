#include <iostream>
#include <string>
#include <vector>

#include "mfe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mfe::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "chiral/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chiral::run_cli(args, std::cout, std::cerr);
}

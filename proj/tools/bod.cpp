#include <iostream>
#include <string>
#include <vector>

#include "bod/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bod::run_cli(args, std::cin, std::cout, std::cerr);
}

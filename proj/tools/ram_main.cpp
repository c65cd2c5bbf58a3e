#include <iostream>
#include <string>
#include <vector>

#include "ram/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ram::cli_main(std::move(args), std::cout, std::cerr);
}

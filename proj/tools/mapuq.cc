#include <iostream>
#include <string>
#include <vector>

#include "mapuq/cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mapuq::cli::run(args, std::cout, std::cerr);
}

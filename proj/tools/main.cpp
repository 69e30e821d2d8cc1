#include <iostream>
#include <string>
#include <vector>

#include "tdgl_ring/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tdgl_ring::cli::run(args, std::cout, std::cerr);
}

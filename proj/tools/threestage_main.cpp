#include <iostream>
#include <string>
#include <vector>

#include "threestage/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return threestage::run_cli(args, std::cout, std::cerr);
}

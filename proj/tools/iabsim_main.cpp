#include <iostream>

#include "iabsim/cli.hpp"
#include "iabsim/config.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return iabsim::run_cli(args, std::cout, std::cerr, iabsim::process_environment());
}

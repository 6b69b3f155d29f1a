#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "iabsim/error.hpp"

namespace iabsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitData = 4,
  kExitNumeric = 5,
};

int exit_code_for(ErrorKind kind);

// Entry point of the iabsim command line. args[0] is the program name.
// `env` supplies IABSIM_* overrides.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env);

}  // namespace iabsim

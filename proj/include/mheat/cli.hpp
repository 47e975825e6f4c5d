#pragma once

#include "mheat/error.hpp"

namespace mheat {

// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitCheck = 4,
};

int exit_code_for(ErrorKind kind);

// Subcommands run, verify, sweep-eps, converge-tau, uniq, mms.
int run_cli(int argc, char** argv);

}  // namespace mheat

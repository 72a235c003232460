#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace swigid {

/// Exit codes of the command line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,
  exit_not_identified = 2,
  exit_verify_failed = 3,
};

/// Runs the `swigid` command line; `args` includes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swigid

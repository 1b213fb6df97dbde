#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qthresh {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitContractFailure = 1,  // a checked inequality failed: implementation bug
  kExitUsage = 2,            // bad flags, unreadable or malformed input
  kExitCap = 3,              // a desk-scale enumeration cap would be exceeded
};

/// Runs `qthresh <subcommand> ...`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qthresh

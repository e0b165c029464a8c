#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pframe {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitUsage = 2,
    kExitDomain = 3,
    kExitStage = 4,
};

/// Runs one command line (without the program name). Reports go to `out`
/// unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pframe

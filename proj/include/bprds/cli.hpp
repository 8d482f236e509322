#ifndef BPRDS_CLI_HPP
#define BPRDS_CLI_HPP

#include <iosfwd>

namespace bprds::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParseFailure = 2,
    kSchemaFailure = 3,
    kTrainingFailure = 4,
    kModelFileFailure = 5,
};

/// Entry point for the command-line tool; output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bprds::cli

#endif  // BPRDS_CLI_HPP

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orbitpe::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kGenerationFailure = 3,
    kEvaluationFailure = 4,
    kIoFailure = 5,
};

/// Runs one `orbitpe` invocation. `args` excludes the program name.
/// Option values resolve as: flag, then ORBITPE_<NAME> environment variable,
/// then the --config JSON file ({"<subcommand>": {...}} or top-level keys),
/// then the built-in default.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbitpe::cli

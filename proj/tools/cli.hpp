#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace bblab::cli {

/// Exit codes of every command.
enum ExitCode : int { kPass = 0, kNumericalFailure = 1, kConfigError = 2 };

/// Default tolerances by name; each can be overridden with --tol.<name>=<value>.
std::map<std::string, double> default_tolerances();

/// Runs one command line (without the program name). Reports go to `out`
/// (or to --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bblab::cli

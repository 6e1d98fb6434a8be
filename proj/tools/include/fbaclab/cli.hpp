#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fbaclab {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kGateFailure = 4,
};

/// Runs one command line (without the program name). Output files go under
/// --out; progress and summaries go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

/// Full default configuration of a subcommand (every accepted key).
nlohmann::json default_config(const std::string& command);

}  // namespace fbaclab

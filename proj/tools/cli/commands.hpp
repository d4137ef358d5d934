#pragma once

#include <iosfwd>
#include <string_view>

#include "cli/config.hpp"

namespace bilap::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_invalid_config = 2,
  exit_uncertified = 3,
  exit_solver_failure = 4,
  exit_bound_violation = 5,
};

struct CommandOptions {
  bool strict = false;
  unsigned jobs = 1;
  std::ostream* log = nullptr;  // defaults to std::cout
};

// Each command validates the configuration first and writes its CSV files to
// config.output_dir. Errors are mapped to exit codes.
int cmd_exponents(const RunConfig& config, const CommandOptions& opts);
int cmd_solve(const RunConfig& config, const CommandOptions& opts);
int cmd_verify(const RunConfig& config, const CommandOptions& opts);
int cmd_sweep(const RunConfig& config, const CommandOptions& opts);

int run_command(std::string_view name, const RunConfig& config, const CommandOptions& opts);

}  // namespace bilap::cli

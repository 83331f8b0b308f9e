#pragma once

#include "pput/config.hpp"

namespace pput {

/// Command entry points shared by the CLI and the test suites. Each writes
/// deterministic files into cfg.output_dir and returns a process exit status
/// (0 on success; cmd_verify returns the number of failed checks).
int cmd_solve(const RunConfig& cfg);
int cmd_boundary(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);

} // namespace pput

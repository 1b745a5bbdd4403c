#pragma once

#include "config.hpp"

namespace fyflow::cli {

/// Execute a validated configuration. Returns 0 on success, 1 when an
/// embedded assertion fails; solver problems surface as SolverError.
int run_command(const RunConfig& cfg);

} // namespace fyflow::cli

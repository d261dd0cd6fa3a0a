#pragma once

#include <string>

#include "gsis/config.hpp"

namespace gsis {

/// Executes one experiment: result files are written into the resolved output
/// directory first, the manifest last and atomically, so a manifest's
/// presence certifies a complete run. Returns 0 on success, 1 when the
/// experiment reports a property failure (violated bound, non-decreasing
/// Cauchy gaps, omega underflow). Module errors propagate as exceptions.
int run(const ExperimentConfig& cfg);

/// config output_dir when set, else $GRAPHON_SIS_OUTPUT_ROOT, else cwd.
std::string resolve_output_dir(const ExperimentConfig& cfg);

} // namespace gsis

#pragma once

#include "kplane/config.hpp"
#include "kplane/report.hpp"

namespace kplane {

// Runs the experiment named in cfg.experiment and returns its report.
// Unknown names raise UsageError; library errors (gates, unsupported
// geometry, divergence) propagate unchanged so callers can print them as is.
// Everything except wall_time and the runtime checks is a deterministic
// function of the config, seed included.
Report run(const ExperimentConfig& cfg);

}  // namespace kplane

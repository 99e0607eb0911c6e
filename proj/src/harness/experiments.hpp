#pragma once

#include "harness/config.hpp"

namespace seqcs::harness {

/// Number of parallel trial workers: SEQCS_WORKERS when set (clamped to at
/// least 1), otherwise the hardware concurrency capped at 16.
int worker_count();

/// Runs the configured experiment end to end: creates the output directory,
/// writes the manifest (status "running"), executes all trials (sharded
/// across workers, deterministic outputs), writes CSVs, finalizes the
/// manifest. Returns 0 on success or 3 if any trial hard-failed.
/// ConfigError propagates for the caller to map to exit code 2.
int run_experiment(const ExperimentConfig& config);

}  // namespace seqcs::harness

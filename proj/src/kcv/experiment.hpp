#pragma once

#include <string>
#include <vector>

#include "kcv/config.hpp"

namespace kcv {

struct SweepError {
    std::size_t index{0};
    double omega_c{0.0};
    std::string group;
    std::string code;
    std::string message;
};

struct ExperimentResult {
    std::string out_dir;
    std::vector<SweepError> errors;
    // 0 clean, 1 an invariant check failed, 3 numeric/propagation errors
    int exit_code{0};
};

// Runs the configured sweep: one worker task per cutoff frequency, results
// merged in sweep order so output files are byte-identical for identical
// configs regardless of the job count. Writes per-group CSVs, summary.csv
// and errors.csv into cfg.out_dir; failed points are recorded and skipped.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

} // namespace kcv

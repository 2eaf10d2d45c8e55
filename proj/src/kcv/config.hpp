#pragma once

#include <string>
#include <vector>

#include "kcv/bath.hpp"

namespace kcv {

enum class CaseKind { case1, case2 };

enum class OutputGroup { rates, viol, nonmarkov, thermo, witnesses };

const char* output_group_name(OutputGroup g);

// Full description of one experiment run; defaults reproduce the reference
// pipeline (s = 1.5, alpha = 0.5, T_bath = 300, window [0, 30],
// measurements at t1 = 15, t2 = 30, 20 log-spaced cutoffs in [0.5, 10]).
struct ExperimentConfig {
    CaseKind kind{CaseKind::case1};
    BathParams bath{}; // omega_c is overridden per sweep point
    double Omega{0.5}; // sigma_x drive, case2 only
    double t1{15.0};
    double t2{30.0};
    double horizon{30.0};
    std::vector<double> omega_c_sweep;
    int grid_steps{3000};
    double ode_step{1e-3};
    std::vector<OutputGroup> outputs{OutputGroup::rates, OutputGroup::viol};
    std::string out_dir{"out"};
    int jobs{1};
    bool trajectory{false};

    static ExperimentConfig defaults();
    void validate() const; // throws errc::parse on invariant violations
};

// Flat key = value text with optional [section] headers; '#' starts a
// comment. Unknown keys, bad values and invariant violations raise
// errc::parse naming the key and line.
ExperimentConfig parse_config(const std::string& text);

// Applies one key = value assignment (same grammar as the file format);
// shared by the parser, the CLI flag layer and the C API setter.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::vector<double> log_spaced(double lo, double hi, int n);

} // namespace kcv

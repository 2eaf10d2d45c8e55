#pragma once

#include <string>
#include <vector>

#include "kcv/bath.hpp"

namespace kcv::check {

struct CriterionResult {
    int id{0};
    std::string name;
    bool passed{false};
    std::string details;
    double seconds{0.0};
};

// Runs the full verification suite (quadrature/propagator oracles, identity
// and bound checks, figure-trend pipeline). Deterministic: fixed seeds and
// sample points.
std::vector<CriterionResult> run_all();

// Independent reference evaluation of the double time-frequency integral for
// the decay rates: composite Simpson on an (s, v) grid with omega = v^2
// (the substitution keeps the integrand smooth at omega = 0). Used as the
// oracle against the reduced one-dimensional quadrature.
DecayRates brute_force_rates(double t, const BathParams& p, int n_s = 0, int n_v = 0);

} // namespace kcv::check

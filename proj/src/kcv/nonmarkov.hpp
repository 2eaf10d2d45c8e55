#pragma once

#include <utility>

#include "kcv/dynamics.hpp"

namespace kcv {

// RHP measure for the canonical-rate master equation: N_RHP(T) = int_0^T
// lambda^-(s) ds = N(T), the negative-part area of the summed rate.
double rhp_measure(const RateProfile& profile, double T);

// Per-channel variant sum_k int max(0, -chi_k) with chi_k in {Gamma,
// gamma_tilde}; differs from rhp_measure when the two rates have opposite
// signs.
double rhp_measure_per_channel(const RateProfile& profile, double T);

// Case I identity viol = 1/2 e^{-M/2} e^{+N_RHP/2} S, returned as
// (reconstructed, direct closed form).
std::pair<double, double> viol_rhp_identity(double t1, double t2, const RateProfile& profile,
                                            double omega0 = 1.0);

// D = sqrt((a1-a2)^2 + |c1-c2|^2), half the trace norm of the difference.
double trace_distance(const QubitState& s1, const QubitState& s2);

// Trace distance of the evolved orthogonal delta-family pair:
// D(t) = sqrt(e^-G sin^2 d + e^-2G cos^2 d).
double delta_family_trace_distance(double delta, double t, const RateProfile& profile);

struct BlpReport {
    double N_blp{0.0};
    double N1_tilde{0.0};
    double N2_tilde{0.0};
    double A_plus{0.0};
    double lower{0.0}, upper{0.0}; // sandwich bounds (filled by blp_viol_sandwich)
    double viol{0.0};              // closed-form violation the sandwich brackets
    // integral of the per-sample maximal backflow rate: the integrand switches
    // between lambda^- e^{-G} and (1/2) lambda^- e^{-G/2} at e^{-G} = 1/4
    double N_sup{0.0};
    // direct delta-grid check
    double numeric_backflow{0.0};  // max over the grid of int max(dD/dt, 0)
    double numeric_delta{0.0};     // maximizing delta on the grid
};

// N1 = 1/2 int lambda^- e^{-G/2}, N2 = int lambda^- e^{-G},
// N_BLP = max(N1, N2); also integrates max(dD/dt, 0) on a uniform delta grid
// as an independent check of the maximizer structure.
BlpReport blp_measure(const RateProfile& profile, double T, int delta_grid_points = 61);

// Case I bounds (S/2)(1 - A+/2 + N_BLP/2) <= viol <= (S/2)(1 - A+/2 + 2 N_BLP);
// throws errc::invariant if the sandwich fails beyond 1e-9.
BlpReport blp_viol_sandwich(double t1, double t2, const RateProfile& profile, double omega0 = 1.0);

} // namespace kcv

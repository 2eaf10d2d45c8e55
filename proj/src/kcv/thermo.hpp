#pragma once

#include "kcv/dynamics.hpp"

namespace kcv {

// S(rho) = f[(1+r)/2] in nats, f the binary entropy.
double von_neumann_entropy(const QubitState& s);

// Equals S(rho(t)) for a pure initial state under the unitary-dilation /
// Born-approximation argument.
double mutual_information(const QubitState& s);

// I = f[(1 + sqrt((2a-1)^2 + 4 viol^2/S^2))/2]; requires |S| >= 1e-6 and a
// radicand <= 1 (+1e-9 slack), else errc::conditioning / errc::invalid_argument.
double mi_from_viol(double viol, double a_t2, double t1, double t2, double omega0 = 1.0);

// F = Var/mean of the x-basis Bernoulli outcome: F = 1 - p_+ = 1/2 - Re c.
double fano_factor(const QubitState& s);

// Case I heat since t=0 (a(0) = 1/2): Q = omega0 (a(t2) - 1/2). Evaluated both
// through the rate formula e^{-G}(1/2 + int e^G Gamma) - 1/2 and through the
// propagated state; throws errc::invariant if the two routes disagree > 1e-8.
double heat(double t2, const RateProfile& profile, double omega0 = 1.0);

// int_0^{t2} e^{G(0,u)} Gamma(u) du (per-cell Gauss-Legendre on the
// interpolated rates).
double excitation_functional(const RateProfile& profile, double t2);

// Q reconstructed from the violation: omega0 [ (2 viol/S)^2 (1/2 + int e^G
// Gamma) - 1/2 ].
double heat_viol_identity(double viol, double t1, double t2, const RateProfile& profile,
                          double omega0 = 1.0);

// Witness inversions for the single-channel limits (S here carries sign or
// not; only S^2 enters forward, |S| is used):
double viol_witness_pure_decay(double Q, double S, double omega0 = 1.0);      // Gamma == 0
double viol_witness_pure_excitation(double Q, double S, double omega0 = 1.0); // gamma_tilde == 0
// Entropy-rate witness (S/sqrt(2)) sqrt(sigma/lambda); valid when adot ~ 0 and
// r << 1.
double viol_witness_from_sigma(double sigma, double lambda, double S);
// Variant with the heat rate in the radical, exposed for comparison.
double viol_witness_from_heat_rate(double Q_rate, double lambda, double S);

struct SigmaResult {
    double sigma{0.0};     // dS/dt - beta * Qdot
    double dS_dt{0.0};
    double heat_rate{0.0}; // omega0 * adot
};

// Spohn entropy-production rate for the sigma_z-sector master equation at the
// given state and instantaneous rates. Throws errc::domain at (near-)pure
// states where the logarithm diverges.
SigmaResult entropy_production_state(const QubitState& s, double Gamma_t, double lambda_t,
                                     double beta, double omega0 = 1.0);

// Case I wrapper: propagates |+> to t under the profile and evaluates sigma.
SigmaResult entropy_production_rate(double t, const RateProfile& profile, double beta,
                                    double omega0 = 1.0);

struct SigmaApprox {
    double approx{0.0}; // 2 lambda viol^2/S^2 - beta omega0 adot
    double exact{0.0};
    double deviation{0.0};
};

// Weak-coherence approximation at t2 built from the closed-form violation.
SigmaApprox entropy_production_approx(double t1, double t2, const RateProfile& profile,
                                      double beta, double omega0 = 1.0);

} // namespace kcv

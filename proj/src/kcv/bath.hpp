#pragma once

#include <iosfwd>
#include <vector>

namespace kcv {

// Dimensionless bath description: all frequencies in units of the qubit
// frequency, time in units of its inverse, beta = beta' * hbar * omega0.
struct BathParams {
    double s{1.5};            // spectral exponent, super-Ohmic (> 1)
    double alpha{0.5};        // coupling strength
    double omega_c{2.0};      // cutoff frequency
    double beta{1.0 / 300.0}; // inverse temperature
    double epsilon{1.0};      // qubit transition frequency (resonant: 1)

    void validate() const;
};

// J(w) = alpha * w^s * exp(-w/omega_c)
double spectral_density(double omega, const BathParams& p);

// Bose occupation 1/(e^{beta w} - 1); requires omega > 0.
double thermal_occupation(double omega, double beta);

struct DecayRates {
    double gamma{0.0};
    double gamma_tilde{0.0};
    double err_gamma{0.0};
    double err_gamma_tilde{0.0};
};

// Time-dependent rates with the inner time integral done analytically:
//   gamma(t)       =     int dw/2pi J(w)      sin[(w-eps)t]/(w-eps)
//   gamma_tilde(t) = 2 * int dw/2pi J(w) n(w) sin[(w-eps)t]/(w-eps)
// evaluated by adaptive Simpson with the panel width capped at
// min(omega_c/8, pi/(4t)) and the removable singularity at w = eps filled by
// a 3-term Taylor series. Throws errc::numeric if the error estimate exceeds
// abs_tol.
DecayRates decay_rates(double t, const BathParams& p, double abs_tol = 1e-9);

// Tabulated rates and their running integrals on a uniform grid over [0, T].
//   Gamma  = 2 gamma - gamma_tilde        (bosonic sign)
//   lambda = Gamma + gamma_tilde
//   G      = int_0^t lambda               (trapezoid; exact for the
//                                          piecewise-linear rate model)
//   M, N   = int_0^t lambda^{+/-}         (pointwise sample split, trapezoid)
//   A_plus = int_0^t lambda^+ e^{-G/2}    (exact per-cell integration of the
//                                          linear model, sign-split)
class RateProfile {
public:
    std::vector<double> t, gamma, gamma_tilde, Gamma, lambda, G, M, N, A_plus;

    // Injected-rate hook: builds every derived column from given samples,
    // bypassing quadrature entirely.
    static RateProfile from_rates(double T, std::vector<double> Gamma_samples,
                                  std::vector<double> gamma_tilde_samples);

    std::size_t size() const { return t.size(); }
    double horizon() const { return t.back(); }
    double step() const { return dt_; }

    double Gamma_at(double time) const;
    double gamma_tilde_at(double time) const;
    double lambda_at(double time) const;
    double G_at(double time) const;
    double M_at(double time) const;
    double N_at(double time) const;
    double A_plus_at(double time) const;
    double G_between(double t0, double t1) const { return G_at(t1) - G_at(t0); }

    struct DampedIntegrals {
        double a_plus{0.0};   // int_0^T lambda^+ e^{-G/2}
        double n1_tilde{0.0}; // 1/2 int_0^T lambda^- e^{-G/2}
        double n2_tilde{0.0}; // int_0^T lambda^- e^{-G}
    };
    // Exact for the piecewise-linear lambda model; cells containing a zero
    // crossing are split at the interpolated root.
    DampedIntegrals damped_integrals(double T) const;

    void write_csv(std::ostream& os) const;

private:
    friend RateProfile build_rate_profile(const BathParams&, double, int);
    void finalize(); // fills Gamma/lambda/G/M/N/A_plus from gamma, gamma_tilde
    void cell_damped(std::size_t i, double b, DampedIntegrals& acc) const;
    std::size_t locate(double time) const;
    double dt_{0.0};
    std::vector<double> n1_tilde_, n2_tilde_; // cumulative, same nodes as A_plus
};

// Tabulates the rates over [0, T] via the analytic frequency integral
// (exponential-cutoff kernel; Hurwitz zeta for the thermal part) integrated
// cumulatively in time with per-cell Simpson.
RateProfile build_rate_profile(const BathParams& p, double T, int n_steps);

namespace detail {
// u-space kernels: gamma(t) = int_0^t kernel_gamma(u) du, and likewise for
// gamma_tilde. Exposed for cross-checking against decay_rates.
double kernel_gamma(double u, const BathParams& p);
double kernel_gamma_tilde(double u, const BathParams& p);
} // namespace detail

} // namespace kcv

#include "kcv/bath.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>

#include "kcv/csv.hpp"
#include "kcv/error.hpp"
#include "kcv/quadrature.hpp"
#include "kcv/special.hpp"

namespace kcv {

namespace {

constexpr double kPi = 3.14159265358979323846;

// sin(x t)/x with the removable singularity filled by its Taylor series.
double sinc_factor(double x, double t) {
    const double xt = x * t;
    if (std::abs(xt) < 1e-4) {
        const double y = xt * xt;
        return t * (1.0 - y / 6.0 + y * y / 120.0);
    }
    return std::sin(xt) / x;
}

double product_jn(double omega, const BathParams& p) {
    if (omega <= 0.0) return 0.0; // J n ~ (alpha/beta) w^{s-1} -> 0 for s > 1
    const double bw = p.beta * omega;
    double n;
    if (bw < 1e-8) {
        n = 1.0 / bw - 0.5 + bw / 12.0;
    } else if (bw > 700.0) {
        return 0.0;
    } else {
        n = 1.0 / std::expm1(bw);
    }
    return spectral_density(omega, p) * n;
}

} // namespace

void BathParams::validate() const {
    if (!(s > 1.0)) fail(errc::domain, "BathParams: spectral exponent must satisfy s > 1");
    if (!(alpha > 0.0)) fail(errc::domain, "BathParams: alpha must be positive");
    if (!(omega_c > 0.0)) fail(errc::domain, "BathParams: omega_c must be positive");
    if (!(beta > 0.0)) fail(errc::domain, "BathParams: beta must be positive");
    if (!(epsilon > 0.0)) fail(errc::domain, "BathParams: epsilon must be positive");
}

double spectral_density(double omega, const BathParams& p) {
    if (omega < 0.0) fail(errc::domain, "spectral_density: omega must be non-negative");
    if (omega == 0.0) return 0.0;
    return p.alpha * std::pow(omega, p.s) * std::exp(-omega / p.omega_c);
}

double thermal_occupation(double omega, double beta) {
    if (!(omega > 0.0)) fail(errc::domain, "thermal_occupation: omega must be positive");
    if (!(beta > 0.0)) fail(errc::domain, "thermal_occupation: beta must be positive");
    const double bw = beta * omega;
    if (bw > 700.0) return 0.0;
    return 1.0 / std::expm1(bw);
}

DecayRates decay_rates(double t, const BathParams& p, double abs_tol) {
    p.validate();
    if (t < 0.0) fail(errc::domain, "decay_rates: t must be non-negative");
    DecayRates out;
    if (t == 0.0) return out;

    const double omega_max = p.epsilon + 40.0 * p.omega_c;
    const double cap = std::min(p.omega_c / 8.0, kPi / (4.0 * t));

    auto fg = [&](double w) {
        return spectral_density(w, p) / (2.0 * kPi) * sinc_factor(w - p.epsilon, t);
    };
    auto fn = [&](double w) { return product_jn(w, p) / kPi * sinc_factor(w - p.epsilon, t); };

    const QuadResult qg = adaptive_simpson(fg, 0.0, omega_max, abs_tol, cap);
    const QuadResult qn = adaptive_simpson(fn, 0.0, omega_max, abs_tol, cap);
    if (qg.error_estimate > abs_tol || qn.error_estimate > abs_tol) {
        fail(errc::numeric, "decay_rates: quadrature error estimate " +
                                format_double(std::max(qg.error_estimate, qn.error_estimate)) +
                                " exceeds tolerance " + format_double(abs_tol));
    }
    out.gamma = qg.value;
    out.gamma_tilde = qn.value;
    out.err_gamma = qg.error_estimate;
    out.err_gamma_tilde = qn.error_estimate;
    return out;
}

// ---------------------------------------------------------------------------
// Analytic u-space kernels
// ---------------------------------------------------------------------------

namespace detail {

// int_0^inf J(w) e^{iwu} dw for J = alpha w^s e^{-w/wc}
static std::complex<double> kernel_phi(double u, const BathParams& p) {
    const std::complex<double> z(1.0 / p.omega_c, -u);
    return p.alpha * std::tgamma(p.s + 1.0) * std::pow(z, -(p.s + 1.0));
}

// int_0^inf J(w) n(w) e^{iwu} dw via the Matsubara sum over e^{-k beta w}
static std::complex<double> kernel_phi_thermal(double u, const BathParams& p) {
    const std::complex<double> z(1.0 / p.omega_c, -u);
    const std::complex<double> q = 1.0 + z / p.beta;
    return p.alpha * std::tgamma(p.s + 1.0) * std::pow(p.beta, -(p.s + 1.0)) *
           hurwitz_zeta(p.s + 1.0, q);
}

double kernel_gamma(double u, const BathParams& p) {
    const std::complex<double> phase(std::cos(p.epsilon * u), -std::sin(p.epsilon * u));
    return (phase * kernel_phi(u, p)).real() / (2.0 * kPi);
}

double kernel_gamma_tilde(double u, const BathParams& p) {
    const std::complex<double> phase(std::cos(p.epsilon * u), -std::sin(p.epsilon * u));
    return (phase * kernel_phi_thermal(u, p)).real() / kPi;
}

} // namespace detail

// ---------------------------------------------------------------------------
// RateProfile
// ---------------------------------------------------------------------------

void RateProfile::finalize() {
    const std::size_t n = t.size();
    dt_ = t[1] - t[0];
    Gamma.resize(n);
    lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Gamma[i] = 2.0 * gamma[i] - gamma_tilde[i];
        lambda[i] = Gamma[i] + gamma_tilde[i];
    }
    G.assign(n, 0.0);
    M.assign(n, 0.0);
    N.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = t[i + 1] - t[i];
        G[i + 1] = G[i] + 0.5 * h * (lambda[i] + lambda[i + 1]);
        M[i + 1] = M[i] + 0.5 * h * (std::max(lambda[i], 0.0) + std::max(lambda[i + 1], 0.0));
        N[i + 1] = N[i] + 0.5 * h * (std::max(-lambda[i], 0.0) + std::max(-lambda[i + 1], 0.0));
    }
    A_plus.assign(n, 0.0);
    n1_tilde_.assign(n, 0.0);
    n2_tilde_.assign(n, 0.0);
    DampedIntegrals acc;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cell_damped(i, t[i + 1], acc);
        A_plus[i + 1] = acc.a_plus;
        n1_tilde_[i + 1] = acc.n1_tilde;
        n2_tilde_[i + 1] = acc.n2_tilde;
    }
}

RateProfile RateProfile::from_rates(double T, std::vector<double> Gamma_samples,
                                    std::vector<double> gamma_tilde_samples) {
    if (!(T > 0.0)) fail(errc::domain, "RateProfile: horizon must be positive");
    if (Gamma_samples.size() != gamma_tilde_samples.size() || Gamma_samples.size() < 3)
        fail(errc::invalid_argument, "RateProfile: need matching sample arrays of size >= 3");
    RateProfile prof;
    const std::size_t n = Gamma_samples.size();
    prof.t.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        prof.t[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
    prof.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        prof.gamma[i] = 0.5 * (Gamma_samples[i] + gamma_tilde_samples[i]);
    prof.gamma_tilde = std::move(gamma_tilde_samples);
    // Recover Gamma/lambda from gamma, gamma_tilde in finalize().
    prof.finalize();
    return prof;
}

std::size_t RateProfile::locate(double time) const {
    if (time < -1e-12 || time > horizon() + 1e-9)
        fail(errc::range, "RateProfile: time " + format_double(time) + " outside [0, " +
                              format_double(horizon()) + "]");
    const double clamped = std::clamp(time, 0.0, horizon());
    auto i = static_cast<std::size_t>(clamped / dt_);
    if (i + 1 >= t.size()) i = t.size() - 2;
    return i;
}

namespace {
double lerp_at(const std::vector<double>& tt, const std::vector<double>& y, std::size_t i,
               double time) {
    const double w = (time - tt[i]) / (tt[i + 1] - tt[i]);
    return y[i] * (1.0 - w) + y[i + 1] * w;
}
} // namespace

double RateProfile::Gamma_at(double time) const { return lerp_at(t, Gamma, locate(time), time); }
double RateProfile::gamma_tilde_at(double time) const {
    return lerp_at(t, gamma_tilde, locate(time), time);
}
double RateProfile::lambda_at(double time) const { return lerp_at(t, lambda, locate(time), time); }

double RateProfile::G_at(double time) const {
    const std::size_t i = locate(time);
    const double lam_t = lerp_at(t, lambda, i, time);
    return G[i] + 0.5 * (time - t[i]) * (lambda[i] + lam_t);
}

double RateProfile::M_at(double time) const {
    const std::size_t i = locate(time);
    const double w = (time - t[i]) / dt_;
    const double lp0 = std::max(lambda[i], 0.0);
    const double lp1 = std::max(lambda[i + 1], 0.0);
    const double lp_t = lp0 * (1.0 - w) + lp1 * w;
    return M[i] + 0.5 * (time - t[i]) * (lp0 + lp_t);
}

double RateProfile::N_at(double time) const {
    const std::size_t i = locate(time);
    const double w = (time - t[i]) / dt_;
    const double lm0 = std::max(-lambda[i], 0.0);
    const double lm1 = std::max(-lambda[i + 1], 0.0);
    const double lm_t = lm0 * (1.0 - w) + lm1 * w;
    return N[i] + 0.5 * (time - t[i]) * (lm0 + lm_t);
}

double RateProfile::A_plus_at(double time) const { return damped_integrals(time).a_plus; }

// One-signed piece [a,b] of a cell: int lambda e^{-G/2} = 2(e^{-Ga/2} - e^{-Gb/2}),
// int lambda e^{-G} = e^{-Ga} - e^{-Gb}; routed by the sign of lambda on the piece.
void RateProfile::cell_damped(std::size_t i, double b, DampedIntegrals& acc) const {
    const double a = t[i];
    if (b <= a) return;

    auto accumulate = [&acc](double Ga, double Gb, double lam_sign) {
        if (lam_sign > 0.0) {
            acc.a_plus += 2.0 * (std::exp(-0.5 * Ga) - std::exp(-0.5 * Gb));
        } else if (lam_sign < 0.0) {
            acc.n1_tilde += std::exp(-0.5 * Gb) - std::exp(-0.5 * Ga);
            acc.n2_tilde += std::exp(-Gb) - std::exp(-Ga);
        }
    };

    const double la = lambda[i];
    const double lb = lambda_at(b);
    const double Ga = G[i];
    const double Gb = G_at(b);
    if (la * lb < 0.0) {
        const double slope = (lambda[i + 1] - lambda[i]) / dt_;
        const double root = a - la / slope;
        if (root > a && root < b) {
            const double Gr = G_at(root);
            accumulate(Ga, Gr, la);
            accumulate(Gr, Gb, lb);
            return;
        }
    }
    accumulate(Ga, Gb, 0.5 * (la + lb));
}

RateProfile::DampedIntegrals RateProfile::damped_integrals(double T) const {
    const std::size_t i = locate(T);
    DampedIntegrals out{A_plus[i], n1_tilde_[i], n2_tilde_[i]};
    cell_damped(i, std::clamp(T, 0.0, horizon()), out);
    return out;
}

void RateProfile::write_csv(std::ostream& os) const {
    CsvWriter w(os);
    w.header("t,gamma,gamma_tilde,Gamma,lambda,G,M,N,A_plus");
    for (std::size_t i = 0; i < t.size(); ++i) {
        w.col(t[i])
            .col(gamma[i])
            .col(gamma_tilde[i])
            .col(Gamma[i])
            .col(lambda[i])
            .col(G[i])
            .col(M[i])
            .col(N[i])
            .col(A_plus[i]);
        w.endrow();
    }
}

RateProfile build_rate_profile(const BathParams& p, double T, int n_steps) {
    p.validate();
    if (!(T > 0.0)) fail(errc::domain, "build_rate_profile: horizon must be positive");
    if (n_steps < 2) fail(errc::domain, "build_rate_profile: need at least 2 steps");

    const auto n = static_cast<std::size_t>(n_steps);
    const double h = T / static_cast<double>(n);

    // Kernel samples at nodes and midpoints, then cumulative per-cell Simpson.
    std::vector<double> kg(2 * n + 1), kn(2 * n + 1);
    for (std::size_t j = 0; j <= 2 * n; ++j) {
        const double u = 0.5 * h * static_cast<double>(j);
        kg[j] = detail::kernel_gamma(u, p);
        kn[j] = detail::kernel_gamma_tilde(u, p);
    }

    RateProfile prof;
    prof.t.resize(n + 1);
    prof.gamma.assign(n + 1, 0.0);
    prof.gamma_tilde.assign(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) prof.t[i] = T * static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        prof.gamma[i + 1] = prof.gamma[i] + h / 6.0 * (kg[2 * i] + 4.0 * kg[2 * i + 1] + kg[2 * i + 2]);
        prof.gamma_tilde[i + 1] =
            prof.gamma_tilde[i] + h / 6.0 * (kn[2 * i] + 4.0 * kn[2 * i + 1] + kn[2 * i + 2]);
    }
    prof.finalize();
    return prof;
}

} // namespace kcv

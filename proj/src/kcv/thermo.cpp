#include "kcv/thermo.hpp"

#include <cmath>

#include "kcv/csv.hpp"
#include "kcv/error.hpp"
#include "kcv/kcc.hpp"

namespace kcv {

namespace {

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

constexpr double kMinSine = 1e-6;

// 3-point Gauss-Legendre weights on [-1,1]
constexpr double kGlNode = 0.7745966692414834;
constexpr double kGlW0 = 8.0 / 9.0;
constexpr double kGlW1 = 5.0 / 9.0;

} // namespace

double von_neumann_entropy(const QubitState& s) {
    const double r = bloch_radius(s);
    if (r >= 1.0) return 0.0;
    return binary_entropy(0.5 * (1.0 + r));
}

double mutual_information(const QubitState& s) { return von_neumann_entropy(s); }

double mi_from_viol(double viol, double a_t2, double t1, double t2, double omega0) {
    const double S = sine_factor(t1, t2, omega0);
    if (S < kMinSine)
        fail(errc::conditioning, "mi_from_viol: sine factor " + format_double(S) +
                                     " below threshold " + format_double(kMinSine));
    const double z = 2.0 * a_t2 - 1.0;
    const double ratio = viol / S;
    double radicand = z * z + 4.0 * ratio * ratio;
    if (radicand > 1.0 + 1e-9)
        fail(errc::invalid_argument,
             "mi_from_viol: inconsistent inputs, radicand = " + format_double(radicand));
    radicand = std::min(radicand, 1.0);
    return binary_entropy(0.5 * (1.0 + std::sqrt(radicand)));
}

double fano_factor(const QubitState& s) { return 0.5 - s.c.real(); }

double excitation_functional(const RateProfile& profile, double t2) {
    // per-cell 3-point Gauss-Legendre of e^{G(0,s)} Gamma(s) on the
    // interpolated rate model
    double acc = 0.0;
    const std::size_t n = profile.size();
    for (std::size_t i = 0; i + 1 < n && profile.t[i] < t2 - 1e-15; ++i) {
        const double a = profile.t[i];
        const double b = std::min(t2, profile.t[i + 1]);
        if (b <= a) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto f = [&](double s) { return std::exp(profile.G_at(s)) * profile.Gamma_at(s); };
        acc += half * (kGlW0 * f(mid) + kGlW1 * f(mid - kGlNode * half) +
                       kGlW1 * f(mid + kGlNode * half));
    }
    return acc;
}

double heat(double t2, const RateProfile& profile, double omega0) {
    const double G2 = profile.G_at(t2);
    const double q_formula = omega0 * (std::exp(-G2) * (0.5 + excitation_functional(profile, t2)) - 0.5);

    const QubitState evolved =
        propagate_closed_form(QubitState{0.5, cplx(0.5, 0.0)}, 0.0, t2, profile, omega0);
    const double q_state = omega0 * (evolved.a - 0.5);

    const double scale = std::max(1.0, std::abs(q_state));
    if (std::abs(q_formula - q_state) > 1e-8 * scale)
        fail(errc::invariant, "heat: formula route " + format_double(q_formula) +
                                  " disagrees with state route " + format_double(q_state));
    return q_state;
}

double heat_viol_identity(double viol, double t1, double t2, const RateProfile& profile,
                          double omega0) {
    const double S = sine_factor(t1, t2, omega0);
    if (S < kMinSine)
        fail(errc::conditioning, "heat_viol_identity: sine factor below threshold");
    const double ratio = 2.0 * viol / S;
    return omega0 * (ratio * ratio * (0.5 + excitation_functional(profile, t2)) - 0.5);
}

double viol_witness_pure_decay(double Q, double S, double omega0) {
    const double radicand = 1.0 + 2.0 * Q / omega0;
    if (radicand < -1e-12) fail(errc::domain, "viol_witness_pure_decay: Q below -omega0/2");
    return 0.5 * std::abs(S) * std::sqrt(std::max(radicand, 0.0));
}

double viol_witness_pure_excitation(double Q, double S, double omega0) {
    const double radicand = 1.0 - 2.0 * Q / omega0;
    if (radicand < -1e-12) fail(errc::domain, "viol_witness_pure_excitation: Q above omega0/2");
    return 0.5 * std::abs(S) * std::sqrt(std::max(radicand, 0.0));
}

double viol_witness_from_sigma(double sigma, double lambda, double S) {
    if (!(lambda > 0.0)) fail(errc::domain, "viol_witness_from_sigma: lambda must be positive");
    if (sigma < 0.0) fail(errc::domain, "viol_witness_from_sigma: sigma must be non-negative");
    return std::abs(S) / std::sqrt(2.0) * std::sqrt(sigma / lambda);
}

double viol_witness_from_heat_rate(double Q_rate, double lambda, double S) {
    if (!(lambda > 0.0)) fail(errc::domain, "viol_witness_from_heat_rate: lambda must be positive");
    if (Q_rate < 0.0) fail(errc::domain, "viol_witness_from_heat_rate: rate must be non-negative");
    return std::abs(S) / std::sqrt(2.0) * std::sqrt(Q_rate / lambda);
}

SigmaResult entropy_production_state(const QubitState& s, double Gamma_t, double lambda_t,
                                     double beta, double omega0) {
    const double adot = Gamma_t - lambda_t * s.a;
    const double re_c_cdot = -0.5 * lambda_t * std::norm(s.c); // Re[c* cdot]
    const double z = s.a - 0.5;
    // radius in the convention where the eigenvalues are 1/2 +/- r_half
    const double r_half = std::sqrt(z * z + std::norm(s.c));
    if (r_half >= 0.5 - 1e-12)
        fail(errc::domain, "entropy_production: state is (numerically) pure, dS/dt diverges");

    const double numerator = z * adot + re_c_cdot;
    double dS;
    if (r_half < 1e-4) {
        // L(r)/r = 4 + (16/3) r^2 + O(r^4)
        dS = -numerator * (4.0 + 16.0 / 3.0 * r_half * r_half);
    } else {
        dS = -numerator / r_half * std::log((0.5 + r_half) / (0.5 - r_half));
    }
    SigmaResult out;
    out.dS_dt = dS;
    out.heat_rate = omega0 * adot;
    out.sigma = dS - beta * out.heat_rate;
    return out;
}

SigmaResult entropy_production_rate(double t, const RateProfile& profile, double beta,
                                    double omega0) {
    const QubitState s =
        propagate_closed_form(QubitState{0.5, cplx(0.5, 0.0)}, 0.0, t, profile, omega0);
    return entropy_production_state(s, profile.Gamma_at(t), profile.lambda_at(t), beta, omega0);
}

SigmaApprox entropy_production_approx(double t1, double t2, const RateProfile& profile,
                                      double beta, double omega0) {
    const double S = sine_factor(t1, t2, omega0);
    if (S < kMinSine)
        fail(errc::conditioning, "entropy_production_approx: sine factor below threshold");
    const double viol = kcc_violation_closed_form(t1, t2, profile, omega0).viol;
    const double lambda_t2 = profile.lambda_at(t2);
    const QubitState s =
        propagate_closed_form(QubitState{0.5, cplx(0.5, 0.0)}, 0.0, t2, profile, omega0);
    const double adot = profile.Gamma_at(t2) - lambda_t2 * s.a;
    SigmaApprox out;
    const double ratio = viol / S;
    out.approx = 2.0 * lambda_t2 * ratio * ratio - beta * omega0 * adot;
    out.exact = entropy_production_state(s, profile.Gamma_at(t2), lambda_t2, beta, omega0).sigma;
    out.deviation = out.approx - out.exact;
    return out;
}

} // namespace kcv

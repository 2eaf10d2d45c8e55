#include "kcv/nonmarkov.hpp"

#include <algorithm>
#include <cmath>

#include "kcv/csv.hpp"
#include "kcv/error.hpp"
#include "kcv/kcc.hpp"

namespace kcv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double rhp_measure(const RateProfile& profile, double T) { return profile.N_at(T); }

double rhp_measure_per_channel(const RateProfile& profile, double T) {
    if (T < 0.0 || T > profile.horizon() + 1e-9)
        fail(errc::range, "rhp_measure_per_channel: T outside the profile horizon");
    // trapezoid over the grid with pointwise per-channel negative parts
    double acc = 0.0;
    const std::size_t n = profile.size();
    auto neg = [](double x) { return std::max(-x, 0.0); };
    for (std::size_t i = 0; i + 1 < n && profile.t[i] < T; ++i) {
        const double b = std::min(T, profile.t[i + 1]);
        const double w = (b - profile.t[i]) / (profile.t[i + 1] - profile.t[i]);
        const double f0 = neg(profile.Gamma[i]) + neg(profile.gamma_tilde[i]);
        const double f1 = neg(profile.Gamma[i + 1]) + neg(profile.gamma_tilde[i + 1]);
        const double fb = f0 * (1.0 - w) + f1 * w;
        acc += 0.5 * (b - profile.t[i]) * (f0 + fb);
    }
    return acc;
}

std::pair<double, double> viol_rhp_identity(double t1, double t2, const RateProfile& profile,
                                            double omega0) {
    const double S = sine_factor(t1, t2, omega0);
    const double reconstructed = 0.5 * std::exp(-0.5 * profile.M_at(t2)) *
                                 std::exp(0.5 * rhp_measure(profile, t2)) * S;
    const double direct = kcc_violation_closed_form(t1, t2, profile, omega0).viol;
    return {reconstructed, direct};
}

double trace_distance(const QubitState& s1, const QubitState& s2) {
    const double da = s1.a - s2.a;
    return std::sqrt(da * da + std::norm(s1.c - s2.c));
}

double delta_family_trace_distance(double delta, double t, const RateProfile& profile) {
    const double eG = std::exp(-profile.G_at(t));
    const double sd = std::sin(delta), cd = std::cos(delta);
    return std::sqrt(eG * sd * sd + eG * eG * cd * cd);
}

BlpReport blp_measure(const RateProfile& profile, double T, int delta_grid_points) {
    if (delta_grid_points < 2) fail(errc::invalid_argument, "blp_measure: delta grid too small");
    BlpReport rep;
    const RateProfile::DampedIntegrals di = profile.damped_integrals(T);
    rep.N1_tilde = di.n1_tilde;
    rep.N2_tilde = di.n2_tilde;
    rep.A_plus = di.a_plus;
    rep.N_blp = std::max(rep.N1_tilde, rep.N2_tilde);

    // Per-sample maximal backflow rate, integrand switched at e^{-G} = 1/4.
    const std::size_t last = std::min(
        static_cast<std::size_t>(T / profile.step() + 0.5), profile.size() - 1);
    auto sup_rate = [&](std::size_t i) {
        const double eg = std::exp(-profile.G[i]);
        return std::max(-profile.lambda[i], 0.0) * std::max(eg, 0.5 * std::sqrt(eg));
    };
    for (std::size_t i = 0; i + 1 <= last; ++i)
        rep.N_sup += 0.5 * profile.step() * (sup_rate(i) + sup_rate(i + 1));

    // Direct check: accumulate positive increments of D(t) per delta.
    double best = -1.0, best_delta = 0.0;
    for (int k = 0; k < delta_grid_points; ++k) {
        const double d = kPi * static_cast<double>(k) / static_cast<double>(delta_grid_points - 1);
        const double sd2 = std::sin(d) * std::sin(d);
        const double cd2 = std::cos(d) * std::cos(d);
        double flow = 0.0;
        double prev = std::sqrt(sd2 + cd2); // G(0) = 0
        for (std::size_t i = 1; i <= last; ++i) {
            const double eG = std::exp(-profile.G[i]);
            const double D = std::sqrt(eG * sd2 + eG * eG * cd2);
            flow += std::max(D - prev, 0.0);
            prev = D;
        }
        if (flow > best) {
            best = flow;
            best_delta = d;
        }
    }
    rep.numeric_backflow = best;
    rep.numeric_delta = best_delta;
    return rep;
}

BlpReport blp_viol_sandwich(double t1, double t2, const RateProfile& profile, double omega0) {
    BlpReport rep = blp_measure(profile, t2);
    const double S = sine_factor(t1, t2, omega0);
    rep.viol = kcc_violation_closed_form(t1, t2, profile, omega0).viol;
    rep.lower = 0.5 * S * (1.0 - 0.5 * rep.A_plus + 0.5 * rep.N_blp);
    rep.upper = 0.5 * S * (1.0 - 0.5 * rep.A_plus + 2.0 * rep.N_blp);
    constexpr double tol = 1e-9;
    if (rep.viol < rep.lower - tol || rep.viol > rep.upper + tol)
        fail(errc::invariant,
             "blp_viol_sandwich: violated, lower=" + format_double(rep.lower) +
                 " viol=" + format_double(rep.viol) + " upper=" + format_double(rep.upper));
    return rep;
}

} // namespace kcv

#include "kcv/kcc.hpp"

#include <cmath>

#include "kcv/error.hpp"

namespace kcv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MeasurementBasis::MeasurementBasis(double th, double ph) : theta(th), phi(ph) {
    if (theta < 0.0 || theta > kPi) fail(errc::domain, "MeasurementBasis: theta outside [0, pi]");
    if (theta == 0.0 || theta == kPi) phi = 0.0;
}

MeasurementBasis MeasurementBasis::x_basis() { return {kPi / 2.0, 0.0}; }

Matrix2 MeasurementBasis::projector_u1() const {
    const double au1 = 0.5 * (1.0 + std::cos(theta));
    const cplx cu1 = 0.5 * std::sin(theta) * std::polar(1.0, -phi);
    return Matrix2{cplx(au1, 0.0), cu1, std::conj(cu1), cplx(1.0 - au1, 0.0)};
}

Matrix2 MeasurementBasis::projector(int outcome) const {
    const Matrix2 p1 = projector_u1();
    if (outcome == 0) return p1;
    return Matrix2{1.0 - p1.m00, -p1.m01, -p1.m10, 1.0 - p1.m11};
}

double single_time_prob(const QubitState& s, const MeasurementBasis& basis, Outcome outcome) {
    const double lead = (s.a - 0.5) * std::cos(basis.theta) +
                        std::sin(basis.theta) * (std::polar(1.0, basis.phi) * s.c).real();
    return outcome == Outcome::u1 ? 0.5 + lead : 0.5 - lead;
}

QubitState post_measurement_state(const MeasurementBasis& basis, Outcome outcome) {
    const double a1 = 0.5 * (1.0 + std::cos(basis.theta));
    const cplx c1 = 0.5 * std::sin(basis.theta) * std::polar(1.0, -basis.phi);
    if (outcome == Outcome::u1) return QubitState{a1, c1};
    return QubitState{1.0 - a1, -c1};
}

double conditional_prob(const MeasurementBasis& basis, Outcome outcome1, double t1, double t2,
                        Outcome outcome2, const RateProfile& profile, const Hamiltonian& H,
                        const PropagationOptions& opts) {
    if (t1 < 0.0 || t2 < t1) fail(errc::range, "conditional_prob: need 0 <= t1 <= t2");
    if (t2 == t1) return outcome1 == outcome2 ? 1.0 : 0.0;
    const QubitState collapsed = post_measurement_state(basis, outcome1);
    const QubitState evolved = propagate(collapsed, H, t1, t2, profile, opts);
    return single_time_prob(evolved, basis, outcome2);
}

ViolResult kcc_violation(const QubitState& initial, const MeasurementBasis& basis, double t1,
                         double t2, const RateProfile& profile, const Hamiltonian& H,
                         const PropagationOptions& opts) {
    if (t1 < 0.0 || t2 < t1) fail(errc::range, "kcc_violation: need 0 <= t1 <= t2");
    const QubitState at_t1 = propagate(initial, H, 0.0, t1, profile, opts);
    const QubitState at_t2 = propagate(at_t1, H, t1, t2, profile, opts);

    const double p1 = single_time_prob(at_t1, basis, Outcome::u1);
    const double p2 = 1.0 - p1;
    const QubitState branch1 = propagate(post_measurement_state(basis, Outcome::u1), H, t1, t2,
                                         profile, opts);
    const QubitState branch2 = propagate(post_measurement_state(basis, Outcome::u2), H, t1, t2,
                                         profile, opts);

    const double ct = std::cos(basis.theta);
    const double st = std::sin(basis.theta);
    const cplx phase = std::polar(1.0, basis.phi);

    ViolResult out;
    out.P_term = ct * ((at_t2.a - 0.5) - p1 * (branch1.a - 0.5) - p2 * (branch2.a - 0.5));
    out.C_term = st * ((phase * at_t2.c).real() - p1 * (phase * branch1.c).real() -
                       p2 * (phase * branch2.c).real());
    out.viol = std::abs(out.P_term + out.C_term);
    return out;
}

ViolResult kcc_violation_closed_form(double t1, double t2, const RateProfile& profile,
                                     double omega0) {
    if (t1 < 0.0 || t2 < t1) fail(errc::range, "kcc_violation_closed_form: need 0 <= t1 <= t2");
    ViolResult out;
    const double S = sine_factor(t1, t2, omega0);
    const double G2 = profile.G_at(t2);
    out.viol = 0.5 * std::exp(-0.5 * G2) * S;
    out.P_term = 0.0;
    // signed coherence contribution: p_{u1}(t2) - Pi_{u1}(t2)
    out.C_term = -0.5 * std::exp(-0.5 * G2) * std::sin(omega0 * t1) * std::sin(omega0 * (t2 - t1));
    out.S_factor = S;
    out.M_t2 = profile.M_at(t2);
    out.N_t2 = profile.N_at(t2);
    return out;
}

double viol_upper_bound(const RateProfile& profile, double t2) {
    return 0.5 * std::exp(-0.5 * (profile.M_at(t2) - profile.N_at(t2)));
}

double sine_factor(double t1, double t2, double omega0) {
    return std::abs(std::sin(omega0 * t1) * std::sin(omega0 * (t2 - t1)));
}

} // namespace kcv

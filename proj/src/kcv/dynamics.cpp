#include "kcv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kcv/csv.hpp"
#include "kcv/error.hpp"

namespace kcv {

void QubitState::validate(double tol) const {
    if (a < -tol || a > 1.0 + tol)
        fail(errc::domain, "QubitState: population " + format_double(a) + " outside [0,1]");
    if (std::norm(c) > a * (1.0 - a) + tol)
        fail(errc::domain, "QubitState: |c|^2 = " + format_double(std::norm(c)) +
                               " exceeds a(1-a) = " + format_double(a * (1.0 - a)));
}

double bloch_radius(const QubitState& s) {
    const double z = 2.0 * s.a - 1.0;
    return std::sqrt(z * z + 4.0 * std::norm(s.c));
}

namespace {

// 3-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode = 0.7745966692414834; // sqrt(3/5)
constexpr double kGlW0 = 8.0 / 9.0;
constexpr double kGlW1 = 5.0 / 9.0;

struct CellStep {
    double dG;     // int lambda over the piece
    double source; // int_{a}^{b} e^{-(G(b)-G(s))} Gamma(s) ds
};

// One piece [a,b] inside a grid cell: lambda and Gamma linear.
CellStep cell_step(const RateProfile& prof, double a, double b) {
    CellStep out{};
    const double la = prof.lambda_at(a);
    const double lb = prof.lambda_at(b);
    const double h = b - a;
    out.dG = 0.5 * h * (la + lb);

    auto g_local = [&](double s) { // int_a^s lambda, quadratic in s
        const double ls = prof.lambda_at(s);
        return 0.5 * (s - a) * (la + ls);
    };
    auto f = [&](double s) { return std::exp(g_local(s) - out.dG) * prof.Gamma_at(s); };
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * h;
    out.source = half * (kGlW0 * f(mid) + kGlW1 * f(mid - kGlNode * half) +
                         kGlW1 * f(mid + kGlNode * half));
    return out;
}

template <typename Fn>
void for_each_piece(const RateProfile& prof, double t0, double t1, Fn&& fn) {
    if (t1 <= t0) return;
    const double h = prof.step();
    auto i0 = static_cast<std::size_t>(std::clamp(t0, 0.0, prof.horizon()) / h);
    i0 = std::min(i0, prof.size() - 2);
    if (i0 > 0) --i0; // guard against rounding in the division
    for (std::size_t i = i0; i + 1 < prof.size() && prof.t[i] < t1 - 1e-15; ++i) {
        const double a = std::max(t0, prof.t[i]);
        const double b = std::min(t1, prof.t[i + 1]);
        if (b > a + 1e-15) fn(a, b);
    }
}

double positivity_violation(double a, double b, const cplx& c01, const cplx& c10) {
    // eigenvalues of [[a, c01],[c10, b]] for (near-)Hermitian content
    const double tr = a + b;
    const double disc = std::sqrt(std::max(0.25 * (a - b) * (a - b) + std::abs(c01 * c10), 0.0));
    const double lo = 0.5 * tr - disc;
    const double hi = 0.5 * tr + disc;
    return std::max({0.0, -lo, hi - 1.0});
}

} // namespace

Matrix2 propagate_matrix_closed_form(const Matrix2& m, double t0, double t1,
                                     const RateProfile& profile, double omega0) {
    if (t0 < 0.0 || t1 < t0) fail(errc::range, "propagate: need 0 <= t0 <= t1");
    if (t1 > profile.horizon() + 1e-9)
        fail(errc::range, "propagate: t1 = " + format_double(t1) + " beyond profile horizon " +
                              format_double(profile.horizon()));
    const cplx tr = m.trace();
    double m00_re = m.m00.real(), m00_im = m.m00.imag();
    double total_dG = 0.0;
    for_each_piece(profile, t0, t1, [&](double a, double b) {
        const CellStep cs = cell_step(profile, a, b);
        const double damp = std::exp(-cs.dG);
        m00_re = damp * m00_re + tr.real() * cs.source;
        m00_im = damp * m00_im + tr.imag() * cs.source;
        total_dG += cs.dG;
    });
    Matrix2 out;
    out.m00 = cplx(m00_re, m00_im);
    out.m11 = tr - out.m00;
    const double dt = t1 - t0;
    const double damp_half = std::exp(-0.5 * total_dG);
    out.m01 = m.m01 * std::polar(damp_half, -omega0 * dt);
    out.m10 = m.m10 * std::polar(damp_half, +omega0 * dt);
    return out;
}

namespace {

struct Deriv {
    const RateProfile& prof;
    const Hamiltonian& H;
    void operator()(double tt, const cplx y[4], cplx dy[4]) const {
        const double Gam = prof.Gamma_at(tt);
        const double gt = prof.gamma_tilde_at(tt);
        const cplx i1(0.0, 1.0);
        const cplx x00 = y[0], x01 = y[1], x10 = y[2], x11 = y[3];
        // -i[H, X] with H = (omega0/2) sz + Omega sx
        dy[0] = -i1 * H.Omega * (x10 - x01);
        dy[1] = -i1 * H.omega0 * x01 - i1 * H.Omega * (x11 - x00);
        dy[2] = +i1 * H.omega0 * x10 - i1 * H.Omega * (x00 - x11);
        dy[3] = -i1 * H.Omega * (x01 - x10);
        // Gamma L_-[X]: jump |0><1| feeds level 0
        dy[0] += Gam * x11;
        dy[3] -= Gam * x11;
        dy[1] -= 0.5 * Gam * x01;
        dy[2] -= 0.5 * Gam * x10;
        // gamma_tilde L_+[X]
        dy[0] -= gt * x00;
        dy[3] += gt * x00;
        dy[1] -= 0.5 * gt * x01;
        dy[2] -= 0.5 * gt * x10;
    }
};

template <typename Observer>
Matrix2 rk4_matrix(const Matrix2& m, const Hamiltonian& H, double t0, double t1,
                   const RateProfile& profile, double step, Observer&& observe) {
    if (!(step > 0.0)) fail(errc::domain, "propagate_ode: step must be positive");
    if (t0 < 0.0 || t1 < t0) fail(errc::range, "propagate: need 0 <= t0 <= t1");
    if (t1 > profile.horizon() + 1e-9)
        fail(errc::range, "propagate: t1 beyond profile horizon");

    Deriv deriv{profile, H};
    cplx y[4] = {m.m00, m.m01, m.m10, m.m11};
    const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / step - 1e-12)));
    const double h = (t1 - t0) / static_cast<double>(n);
    double tt = t0;
    cplx k1[4], k2[4], k3[4], k4[4], tmp[4];
    for (long i = 0; i < n; ++i) {
        deriv(tt, y, k1);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        deriv(tt + 0.5 * h, tmp, k2);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        deriv(tt + 0.5 * h, tmp, k3);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + h * k3[j];
        deriv(tt + h, tmp, k4);
        for (int j = 0; j < 4; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        tt = (i + 1 == n) ? t1 : t0 + h * static_cast<double>(i + 1);
        observe(tt, y);
    }
    return Matrix2{y[0], y[1], y[2], y[3]};
}

} // namespace

Matrix2 propagate_matrix_ode(const Matrix2& m, const Hamiltonian& H, double t0, double t1,
                             const RateProfile& profile, double step) {
    return rk4_matrix(m, H, t0, t1, profile, step, [](double, const cplx*) {});
}

QubitState propagate_closed_form(const QubitState& s, double t0, double t1,
                                 const RateProfile& profile, double omega0) {
    const Matrix2 m{cplx(s.a, 0.0), s.c, std::conj(s.c), cplx(1.0 - s.a, 0.0)};
    const Matrix2 r = propagate_matrix_closed_form(m, t0, t1, profile, omega0);
    return QubitState{r.m00.real(), r.m01};
}

OdeResult propagate_ode(const QubitState& s, const Hamiltonian& H, double t0, double t1,
                        const RateProfile& profile, double step, PositivityMode mode) {
    constexpr double kPosTol = 1e-6;
    OdeResult out;
    const Matrix2 m{cplx(s.a, 0.0), s.c, std::conj(s.c), cplx(1.0 - s.a, 0.0)};
    const Matrix2 r =
        rk4_matrix(m, H, t0, t1, profile, step, [&](double tt, const cplx y[4]) {
            const double scale = std::max(1.0, std::abs(y[0]) + std::abs(y[3]));
            const double tr_dev = std::abs(y[0] + y[3] - 1.0);
            if (tr_dev > 1e-12 * scale)
                fail(errc::invariant, "propagate_ode: trace drifted by " + format_double(tr_dev));
            const double v = positivity_violation(y[0].real(), y[3].real(), y[1], y[2]);
            if (v > out.max_violation) out.max_violation = v;
            if (v > kPosTol && !out.first_violation_time) {
                if (mode == PositivityMode::strict)
                    fail(errc::positivity, "propagate_ode: positivity violated by " +
                                               format_double(v) + " at t = " + format_double(tt));
                out.first_violation_time = tt;
            }
        });
    out.state = QubitState{r.m00.real(), r.m01};
    return out;
}

QubitState propagate(const QubitState& s, const Hamiltonian& H, double t0, double t1,
                     const RateProfile& profile, const PropagationOptions& opts) {
    if (H.pure_sigma_z()) return propagate_closed_form(s, t0, t1, profile, H.omega0);
    return propagate_ode(s, H, t0, t1, profile, opts.ode_step, opts.positivity).state;
}

void write_trajectory_csv(std::ostream& os, const QubitState& initial, const Hamiltonian& H,
                          const RateProfile& profile, const PropagationOptions& opts) {
    CsvWriter w(os);
    w.header("t,a,re_c,im_c,r");
    QubitState s = initial;
    w.col(0.0).col(s.a).col(s.c.real()).col(s.c.imag()).col(bloch_radius(s));
    w.endrow();
    for (std::size_t i = 1; i < profile.size(); ++i) {
        s = propagate(s, H, profile.t[i - 1], profile.t[i], profile, opts);
        w.col(profile.t[i]).col(s.a).col(s.c.real()).col(s.c.imag()).col(bloch_radius(s));
        w.endrow();
    }
}

} // namespace kcv

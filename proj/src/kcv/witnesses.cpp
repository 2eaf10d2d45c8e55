#include "kcv/witnesses.hpp"

#include <algorithm>
#include <cmath>

#include "kcv/error.hpp"

namespace kcv {

namespace {

Matrix2 multiply(const Matrix2& x, const Matrix2& y) {
    return Matrix2{x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
                   x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
}

cplx trace_product(const Matrix2& p, const Matrix2& x) {
    return p.m00 * x.m00 + p.m01 * x.m10 + p.m10 * x.m01 + p.m11 * x.m11;
}

Matrix2 to_matrix(const QubitState& s) {
    return Matrix2{cplx(s.a, 0.0), s.c, std::conj(s.c), cplx(1.0 - s.a, 0.0)};
}

Matrix2 evolve(const Matrix2& m, double ta, double tb, const RateProfile& prof,
               const Hamiltonian& H, const PropagationOptions& opts) {
    if (H.pure_sigma_z()) return propagate_matrix_closed_form(m, ta, tb, prof, H.omega0);
    return propagate_matrix_ode(m, H, ta, tb, prof, opts.ode_step);
}

} // namespace

double KdTable::max_abs_interference() const {
    double m = 0.0;
    for (const auto& row : interference)
        for (const auto& entry : row) m = std::max(m, std::abs(entry));
    return m;
}

KdTable kd_distribution(double t1, double t2, const MeasurementBasis& basis,
                        const QubitState& initial, const RateProfile& profile,
                        const Hamiltonian& H, const PropagationOptions& opts) {
    if (t1 < 0.0 || t2 < t1) fail(errc::range, "kd_distribution: need 0 <= t1 <= t2");
    KdTable table;

    const Matrix2 rho_t1 = evolve(to_matrix(initial), 0.0, t1, profile, H, opts);
    const Matrix2 proj[2] = {basis.projector(0), basis.projector(1)};

    for (int a = 0; a < 2; ++a) table.p_t1[a] = trace_product(proj[a], rho_t1).real();

    const Matrix2 rho_t2 = evolve(rho_t1, t1, t2, profile, H, opts);
    for (int b = 0; b < 2; ++b) table.p_t2[b] = trace_product(proj[b], rho_t2).real();

    for (int a = 0; a < 2; ++a) {
        // one-sided (non-Hermitian) projection P_a rho(t1)
        const Matrix2 seeded = evolve(multiply(proj[a], rho_t1), t1, t2, profile, H, opts);
        for (int b = 0; b < 2; ++b) table.kd[b][a] = trace_product(proj[b], seeded);

        // classical branch: collapse, renormalize, evolve
        if (table.p_t1[a] > 0.0) {
            const Matrix2 collapsed = multiply(multiply(proj[a], rho_t1), proj[a]);
            const Matrix2 norm{collapsed.m00 / table.p_t1[a], collapsed.m01 / table.p_t1[a],
                               collapsed.m10 / table.p_t1[a], collapsed.m11 / table.p_t1[a]};
            const Matrix2 branch = evolve(norm, t1, t2, profile, H, opts);
            for (int b = 0; b < 2; ++b)
                table.classical[b][a] = table.p_t1[a] * trace_product(proj[b], branch).real();
        } else {
            for (int b = 0; b < 2; ++b) table.classical[b][a] = 0.0;
        }
    }
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a)
            table.interference[b][a] = table.kd[b][a] - table.classical[b][a];
    return table;
}

double kd_kcc_identity(const KdTable& table, Outcome outcome_b) {
    const int b = outcome_b == Outcome::u1 ? 0 : 1;
    return std::abs(table.interference[b][0] + table.interference[b][1]);
}

LgiReport lgi_correlators(double t1, double t2, const RateProfile& profile, double omega0) {
    if (t1 < 0.0 || t2 < t1) fail(errc::range, "lgi_correlators: need 0 <= t1 <= t2");
    LgiReport rep;
    const double G01 = profile.G_at(t1);
    const double G02 = profile.G_at(t2);
    const double G12 = G02 - G01;
    rep.C_01 = std::exp(-0.5 * G01) * std::cos(omega0 * t1);
    rep.C_12 = std::exp(-0.5 * G12) * std::cos(omega0 * (t2 - t1));
    rep.C_02 = std::exp(-0.5 * G02) * std::cos(omega0 * t2);
    rep.K3 = rep.C_01 + rep.C_12 - rep.C_02;
    rep.K3_classical = rep.C_01 + rep.C_12 - rep.C_01 * rep.C_12;
    rep.factorization_gap = rep.C_01 * rep.C_12 - rep.C_02;
    rep.viol = 0.5 * std::abs(rep.factorization_gap);
    rep.lgi_violated = rep.K3 > 1.0;

    // Sequential four-branch trees, one experiment per correlator.
    const MeasurementBasis xb = MeasurementBasis::x_basis();
    const Hamiltonian H{omega0, 0.0};
    const PropagationOptions opts{};
    const QubitState plus{0.5, cplx(0.5, 0.0)};
    auto tree = [&](double ta, double tb) {
        const QubitState at_ta = propagate_closed_form(plus, 0.0, ta, profile, omega0);
        double corr = 0.0;
        for (int q1 = 0; q1 < 2; ++q1) {
            const double pq1 = single_time_prob(at_ta, xb, static_cast<Outcome>(q1));
            if (pq1 <= 0.0) continue;
            for (int q2 = 0; q2 < 2; ++q2) {
                const double pq2 = conditional_prob(xb, static_cast<Outcome>(q1), ta, tb,
                                                    static_cast<Outcome>(q2), profile, H, opts);
                const double sign = (q1 == q2) ? 1.0 : -1.0;
                corr += sign * pq1 * pq2;
            }
        }
        return corr;
    };
    rep.max_tree_deviation =
        std::max({std::abs(tree(0.0, t1) - rep.C_01), std::abs(tree(t1, t2) - rep.C_12),
                  std::abs(tree(0.0, t2) - rep.C_02)});
    rep.decomposition_residual = k3_decomposition(rep);
    return rep;
}

double k3_decomposition(const LgiReport& report) {
    const double s =
        report.factorization_gap > 0.0 ? 1.0 : (report.factorization_gap < 0.0 ? -1.0 : 0.0);
    return std::abs(report.K3 - report.K3_classical - s * 2.0 * report.viol);
}

} // namespace kcv

#pragma once

#include "kcv/kcc.hpp"

namespace kcv {

// Two-time Kirkwood-Dirac quasi-distribution in the process form
// KD(b,a) = Tr[P_b Lambda_{t1->t2}(P_a rho(t1))], alongside the classical
// collapse table p_a(t1) p(b|a) and their difference (the interference).
// Indices are [b][a] with 0 -> u1, 1 -> u2.
struct KdTable {
    cplx kd[2][2]{};
    double classical[2][2]{};
    cplx interference[2][2]{};
    double p_t1[2]{};
    double p_t2[2]{};

    double max_abs_interference() const;
};

KdTable kd_distribution(double t1, double t2, const MeasurementBasis& basis,
                        const QubitState& initial, const RateProfile& profile,
                        const Hamiltonian& H, const PropagationOptions& opts);

// viol_b = |sum_a interference(a, b)|
double kd_kcc_identity(const KdTable& table, Outcome outcome_b);

struct LgiReport {
    double C_01{0.0}, C_12{0.0}, C_02{0.0}; // closed-form correlators
    double K3{0.0};
    double K3_classical{0.0};      // C01 + C12 - C01*C12: K3 under factorization
    double factorization_gap{0.0}; // C01*C12 - C02, equal to +/- 2 viol
    double viol{0.0};       // 1/2 |C01 C12 - C02|
    double decomposition_residual{0.0};
    double max_tree_deviation{0.0}; // closed forms vs sequential four-branch sums
    bool lgi_violated{false};       // K3 > 1
};

// Case I correlators of Q = sigma_x from |+>, both in closed form
// C(ta,tb) = e^{-G(ta,tb)/2} cos(w0 (tb-ta)) and from the sequential
// measurement probability tree.
LgiReport lgi_correlators(double t1, double t2, const RateProfile& profile, double omega0 = 1.0);

// |K3 - K3_classical - sgn(factorization_gap) * 2 viol|
double k3_decomposition(const LgiReport& report);

} // namespace kcv

#pragma once

#include <optional>

#include "kcv/dynamics.hpp"

namespace kcv {

// Projective basis |u1> = cos(th/2)|0> + e^{i phi} sin(th/2)|1>,
// |u2> orthogonal. At the poles phi is irrelevant and canonicalized to 0.
struct MeasurementBasis {
    double theta{0.0};
    double phi{0.0};

    MeasurementBasis() = default;
    MeasurementBasis(double th, double ph);

    static MeasurementBasis pointer() { return {}; }          // sigma_z basis
    static MeasurementBasis x_basis();                        // Case I: theta = pi/2, phi = 0

    Matrix2 projector_u1() const;
    Matrix2 projector(int outcome) const; // 0 -> u1, 1 -> u2
};

enum class Outcome { u1 = 0, u2 = 1 };

// Tr[|u_k><u_k| rho] = 1/2 +/- [(a-1/2)cos th + sin th Re(e^{i phi} c)]
double single_time_prob(const QubitState& s, const MeasurementBasis& basis, Outcome outcome);

// State right after obtaining `outcome`.
QubitState post_measurement_state(const MeasurementBasis& basis, Outcome outcome);

// Collapse at t1 onto outcome1, evolve to t2, measure outcome2.
double conditional_prob(const MeasurementBasis& basis, Outcome outcome1, double t1, double t2,
                        Outcome outcome2, const RateProfile& profile, const Hamiltonian& H,
                        const PropagationOptions& opts);

struct ViolResult {
    double viol{0.0};
    double P_term{0.0};                // population contribution
    double C_term{0.0};                // coherence contribution
    std::optional<double> S_factor;    // |sin(w0 t1) sin(w0 (t2-t1))|, Case I only
    std::optional<double> M_t2, N_t2;  // integrated areas, Case I only
};

// viol = |p_{u1}(t2) - sum_i p_{u_i}(t1) p_{u1}(t2|u_i)| assembled from the
// probability tree; measurement backaction enters only through the collapse.
ViolResult kcc_violation(const QubitState& initial, const MeasurementBasis& basis, double t1,
                         double t2, const RateProfile& profile, const Hamiltonian& H,
                         const PropagationOptions& opts);

// Case I closed form: viol = 1/2 e^{-G(0,t2)/2} |sin(w0 t1) sin(w0 (t2-t1))|
//                          = 1/2 e^{-M/2} S e^{+N/2}.
ViolResult kcc_violation_closed_form(double t1, double t2, const RateProfile& profile,
                                     double omega0 = 1.0);

// 1/2 e^{-(M(t2)-N(t2))/2}; may exceed 1/2 when N > M and is reported as is.
double viol_upper_bound(const RateProfile& profile, double t2);

// |sin(w0 t1) sin(w0 (t2-t1))|
double sine_factor(double t1, double t2, double omega0 = 1.0);

} // namespace kcv

#pragma once

#include <complex>
#include <iosfwd>
#include <optional>

#include "kcv/bath.hpp"

namespace kcv {

using cplx = std::complex<double>;

// Qubit density matrix [[a, c], [c*, 1-a]]; storing (a, c) keeps the state
// Hermitian and trace-one by construction.
struct QubitState {
    double a{1.0}; // population of |0>
    cplx c{0.0};   // coherence <0|rho|1>

    // Positivity within tolerance: 0 <= a <= 1 and |c|^2 <= a(1-a).
    void validate(double tol = 1e-9) const;
};

// r = sqrt((2a-1)^2 + 4|c|^2); eigenvalues of rho are (1 +/- r)/2.
double bloch_radius(const QubitState& s);

struct Hamiltonian {
    double omega0{1.0}; // sigma_z/2 coefficient
    double Omega{0.0};  // sigma_x drive
    bool pure_sigma_z() const { return Omega == 0.0; }
};

// General complex 2x2 matrix, row-major; the dynamical map acts linearly on
// these, Hermitian or not (needed for one-sided projections).
struct Matrix2 {
    cplx m00, m01, m10, m11;
    cplx trace() const { return m00 + m11; }
};

// Exact propagation for H = (omega0/2) sigma_z under the tabulated rates:
//   m00' = e^{-dG} (m00 + tr * int e^{G(t0,s)} Gamma(s) ds),  m11' = tr - m00'
//   m01' = m01 e^{-i omega0 dt - dG/2},  m10' = m10 e^{+i omega0 dt - dG/2}
// Cell-recursive with 3-point Gauss-Legendre source integrals (exact for the
// linear-interpolated rate model to well below 1e-10).
Matrix2 propagate_matrix_closed_form(const Matrix2& m, double t0, double t1,
                                     const RateProfile& profile, double omega0);

// Fixed-step RK4 for dX/dt = -i[H,X] + Gamma(t) L_-[X] + gamma_tilde(t) L_+[X]
// with rates linearly interpolated from the profile. Works on arbitrary
// (non-Hermitian) matrices.
Matrix2 propagate_matrix_ode(const Matrix2& m, const Hamiltonian& H, double t0, double t1,
                             const RateProfile& profile, double step);

enum class PositivityMode {
    strict,    // throw errc::positivity at the first violation beyond 1e-6
    permissive // record the violation and keep integrating
};

struct PropagationOptions {
    double ode_step{1e-3};
    PositivityMode positivity{PositivityMode::strict};
};

struct OdeResult {
    QubitState state;
    std::optional<double> first_violation_time; // only set in permissive mode
    double max_violation{0.0};
};

QubitState propagate_closed_form(const QubitState& s, double t0, double t1,
                                 const RateProfile& profile, double omega0 = 1.0);

OdeResult propagate_ode(const QubitState& s, const Hamiltonian& H, double t0, double t1,
                        const RateProfile& profile, double step,
                        PositivityMode mode = PositivityMode::strict);

// Dispatches to the closed form when H is pure sigma_z, else to RK4.
QubitState propagate(const QubitState& s, const Hamiltonian& H, double t0, double t1,
                     const RateProfile& profile, const PropagationOptions& opts);

// CSV dump `t,a,re_c,im_c,r` of the trajectory from t=0 to the horizon.
void write_trajectory_csv(std::ostream& os, const QubitState& initial, const Hamiltonian& H,
                          const RateProfile& profile, const PropagationOptions& opts);

} // namespace kcv

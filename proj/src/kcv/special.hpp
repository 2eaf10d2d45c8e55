#pragma once

#include <complex>

namespace kcv {

// Hurwitz zeta sum_{k>=0} (q+k)^{-p} for real p > 1 and complex q with
// Re(q) >= 1. Direct summation until |q+k| is large enough, then an
// Euler-Maclaurin tail; accurate to ~1e-15 relative.
std::complex<double> hurwitz_zeta(double p, std::complex<double> q);

} // namespace kcv

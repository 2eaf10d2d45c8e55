#include "kcv/special.hpp"

#include <cmath>

#include "kcv/error.hpp"

namespace kcv {

std::complex<double> hurwitz_zeta(double p, std::complex<double> q) {
    if (!(p > 1.0)) fail(errc::domain, "hurwitz_zeta: requires p > 1");
    if (!(q.real() >= 0.5)) fail(errc::domain, "hurwitz_zeta: requires Re(q) >= 1/2");

    constexpr double kShiftRadius = 18.0;
    std::complex<double> head{0.0, 0.0};
    long k = 0;
    while (std::abs(q + static_cast<double>(k)) < kShiftRadius) {
        head += std::pow(q + static_cast<double>(k), -p);
        ++k;
        if (k > 100000) fail(errc::numeric, "hurwitz_zeta: direct sum failed to leave the origin");
    }
    const std::complex<double> z = q + static_cast<double>(k);

    // Euler-Maclaurin: integral term, half-sample correction, B_{2j} series.
    static constexpr double kB[6] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0,
                                     -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0};
    static constexpr double kFact[6] = {2.0, 24.0, 720.0, 40320.0, 3628800.0, 479001600.0};

    std::complex<double> tail = std::pow(z, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(z, -p);
    double rising = p; // (p)_{2j-1} built incrementally
    std::complex<double> zpow = std::pow(z, -p - 1.0);
    const std::complex<double> inv_z2 = 1.0 / (z * z);
    for (int j = 0; j < 6; ++j) {
        tail += kB[j] / kFact[j] * rising * zpow;
        rising *= (p + 2.0 * j + 1.0) * (p + 2.0 * j + 2.0);
        zpow *= inv_z2;
    }
    return head + tail;
}

} // namespace kcv

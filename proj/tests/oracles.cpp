#include "oracles.hpp"

#include <cmath>

namespace oracle {

std::complex<double> hurwitz_reference(double p, std::complex<double> q, long terms) {
    std::complex<double> sum{0.0, 0.0};
    for (long k = 0; k < terms; ++k) sum += std::pow(q + static_cast<double>(k), -p);
    // integral tail + midpoint correction
    const std::complex<double> z = q + static_cast<double>(terms);
    sum += std::pow(z, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(z, -p);
    return sum;
}

kcv::RateProfile injected_profile(double T, int n, const std::function<double(double)>& Gamma_fn,
                                  const std::function<double(double)>& gamma_tilde_fn) {
    std::vector<double> G(static_cast<std::size_t>(n) + 1), gt(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
        const double tt = T * static_cast<double>(i) / static_cast<double>(n);
        G[i] = Gamma_fn(tt);
        gt[i] = gamma_tilde_fn(tt);
    }
    return kcv::RateProfile::from_rates(T, std::move(G), std::move(gt));
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace oracle

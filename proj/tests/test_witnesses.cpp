#include <doctest.h>

#include <cmath>
#include <random>

#include "kcv/error.hpp"
#include "kcv/witnesses.hpp"
#include "oracles.hpp"

using kcv::cplx;
using kcv::Hamiltonian;
using kcv::KdTable;
using kcv::LgiReport;
using kcv::MeasurementBasis;
using kcv::Outcome;
using kcv::QubitState;
using kcv::RateProfile;

namespace {

constexpr double kPi = 3.14159265358979323846;
const QubitState kPlus{0.5, cplx(0.5, 0.0)};
const Hamiltonian kHz{1.0, 0.0};
const kcv::PropagationOptions kOpts{1e-3, kcv::PositivityMode::permissive};

RateProfile lobe_profile() {
    return oracle::injected_profile(
        30.0, 3000, [](double t) { return 0.08 - 0.12 * std::exp(-1.5 * (t - 6.0) * (t - 6.0)); },
        [](double t) { return 0.05 + 0.02 * std::sin(0.7 * t); });
}

} // namespace

TEST_CASE("coinciding measurement times give the diagonal table") {
    const RateProfile prof = lobe_profile();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uth(0.0, kPi), uph(0.0, 2.0 * kPi);
    for (int k = 0; k < 10; ++k) {
        const MeasurementBasis b(uth(rng), uph(rng));
        const QubitState init{0.6, cplx(0.25, -0.15)};
        const KdTable table = kcv::kd_distribution(5.0, 5.0, b, init, prof, kHz, kOpts);
        for (int bb = 0; bb < 2; ++bb)
            for (int aa = 0; aa < 2; ++aa) {
                if (aa == bb) {
                    CHECK(std::abs(table.kd[bb][aa].imag()) < 1e-14);
                    CHECK(table.kd[bb][aa].real() >= -1e-14);
                    CHECK(std::abs(table.kd[bb][aa].real() - table.p_t1[aa]) < 1e-14);
                } else {
                    CHECK(std::abs(table.kd[bb][aa]) < 1e-14);
                }
            }
    }
}

TEST_CASE("pointer-basis table is classical") {
    const RateProfile prof = lobe_profile();
    const KdTable table = kcv::kd_distribution(3.0, 14.0, MeasurementBasis::pointer(),
                                               QubitState{0.7, cplx(0.2, 0.1)}, prof, kHz, kOpts);
    CHECK(table.max_abs_interference() < 1e-12);
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) CHECK(std::abs(table.kd[b][a].imag()) < 1e-14);
}

TEST_CASE("marginal identities hold for both propagation paths") {
    const RateProfile prof = lobe_profile();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ut(0.0, 28.0), uth(0.0, kPi), uph(0.0, 2.0 * kPi);
    for (const Hamiltonian H : {Hamiltonian{1.0, 0.0}, Hamiltonian{1.0, 0.5}}) {
        for (int k = 0; k < 10; ++k) {
            double t1 = ut(rng), t2 = ut(rng);
            if (t2 < t1) std::swap(t1, t2);
            const MeasurementBasis basis(uth(rng), uph(rng));
            const KdTable table =
                kcv::kd_distribution(t1, t2, basis, QubitState{0.55, cplx(0.3, 0.2)}, prof, H,
                                     kOpts);
            for (int b = 0; b < 2; ++b)
                CHECK(std::abs(table.kd[b][0] + table.kd[b][1] - table.p_t2[b]) < 1e-10);
            for (int a = 0; a < 2; ++a)
                CHECK(std::abs(table.kd[0][a] + table.kd[1][a] - table.p_t1[a]) < 1e-10);
            CHECK(std::abs(table.kd[0][0] + table.kd[0][1] + table.kd[1][0] + table.kd[1][1] -
                           1.0) < 1e-10);
        }
    }
}

TEST_CASE("interference sums to the KCC violation") {
    const RateProfile prof = lobe_profile();
    for (const auto& [t1, t2] : {std::pair{4.0, 11.0}, std::pair{8.8, 27.3}}) {
        const KdTable table =
            kcv::kd_distribution(t1, t2, MeasurementBasis::x_basis(), kPlus, prof, kHz, kOpts);
        const double from_kd = kcv::kd_kcc_identity(table, Outcome::u1);
        const double direct = kcv::kcc_violation_closed_form(t1, t2, prof, 1.0).viol;
        CHECK(std::abs(from_kd - direct) < 1e-8);
        // the minus outcome carries the same violation
        CHECK(std::abs(kcv::kd_kcc_identity(table, Outcome::u2) - direct) < 1e-8);
    }

    // a tilted basis produces genuinely complex interference entries whose
    // summed modulus is still the violation
    const MeasurementBasis tilted(1.2, 0.9);
    const KdTable table =
        kcv::kd_distribution(5.0, 16.0, tilted, QubitState{0.6, cplx(0.3, 0.1)}, prof, kHz, kOpts);
    double max_im = 0.0;
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a)
            max_im = std::max(max_im, std::abs(table.interference[b][a].imag()));
    CHECK(max_im > 1e-4);
    const cplx total = table.interference[0][0] + table.interference[0][1];
    CHECK(kcv::kd_kcc_identity(table, Outcome::u1) == doctest::Approx(std::abs(total)));
}

TEST_CASE("zero interference table yields zero identity value") {
    KdTable table{};
    CHECK(kcv::kd_kcc_identity(table, Outcome::u1) == 0.0);
}

TEST_CASE("free-precession LGI landmarks") {
    const RateProfile free_prof = oracle::injected_profile(
        10.0, 500, [](double) { return 0.0; }, [](double) { return 0.0; });
    // quarter/half period: perfect anticorrelation at t2, K3 = 1
    const LgiReport r1 = kcv::lgi_correlators(kPi / 2.0, kPi, free_prof, 1.0);
    CHECK(std::abs(r1.C_01) < 1e-14);
    CHECK(std::abs(r1.C_12) < 1e-14);
    CHECK(std::abs(r1.C_02 + 1.0) < 1e-14);
    CHECK(std::abs(r1.K3 - 1.0) < 1e-13);
    // the classic maximum at pi/3 spacing
    const LgiReport r2 = kcv::lgi_correlators(kPi / 3.0, 2.0 * kPi / 3.0, free_prof, 1.0);
    CHECK(std::abs(r2.K3 - 1.5) < 1e-12);
    CHECK(r2.lgi_violated);
}

TEST_CASE("sequential trees agree with the closed-form correlators") {
    const RateProfile prof = lobe_profile();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int k = 0; k < 12; ++k) {
        double t1 = u(rng), t2 = u(rng);
        if (t2 < t1) std::swap(t1, t2);
        const LgiReport r = kcv::lgi_correlators(t1, t2, prof, 1.0);
        CHECK(r.max_tree_deviation < 1e-8);
        CHECK(r.decomposition_residual < 1e-10);
        CHECK(std::abs(r.viol - kcv::kcc_violation_closed_form(t1, t2, prof, 1.0).viol) < 1e-12);
        CHECK(kcv::k3_decomposition(r) == r.decomposition_residual);
    }
}

TEST_CASE("consistency forbids LGI violation") {
    const RateProfile prof = lobe_profile();
    for (int k = 1; k <= 8; ++k) {
        for (double delta : {0.9, 2.1, 3.3}) {
            const double t1 = k * kPi;
            const double t2 = t1 + delta;
            if (t2 > 30.0) continue;
            const LgiReport r = kcv::lgi_correlators(t1, t2, prof, 1.0);
            CHECK(r.viol < 1e-12);
            if (std::abs(r.K3_classical) <= 1.0) CHECK(r.K3 <= 1.0 + 1e-10);
        }
    }
}

TEST_CASE("correlator factorization holds exactly at sine-factor zeros") {
    const RateProfile prof = lobe_profile();
    // t1 multiple of pi: C02 = C01 C12
    const LgiReport at_zero = kcv::lgi_correlators(2.0 * kPi, 2.0 * kPi + 1.7, prof, 1.0);
    CHECK(std::abs(at_zero.C_02 - at_zero.C_01 * at_zero.C_12) < 1e-10);
    // generic times: factorization fails by exactly 2 viol
    const LgiReport generic = kcv::lgi_correlators(4.9, 13.7, prof, 1.0);
    CHECK(std::abs(generic.C_02 - generic.C_01 * generic.C_12) > 1e-3);
    CHECK(std::abs(std::abs(generic.factorization_gap) - 2.0 * generic.viol) < 1e-15);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "kcv/error.hpp"
#include "kcv/kcc.hpp"
#include "oracles.hpp"

using kcv::cplx;
using kcv::Hamiltonian;
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
        30.0, 3000, [](double t) { return 0.09 - 0.14 * std::exp(-1.2 * (t - 7.0) * (t - 7.0)); },
        [](double t) { return 0.06 + 0.03 * std::sin(0.9 * t); });
}

} // namespace

TEST_CASE("single-time probabilities") {
    const MeasurementBasis pointer = MeasurementBasis::pointer();
    CHECK(kcv::single_time_prob(QubitState{0.7, cplx(0.1, 0.2)}, pointer, Outcome::u1) ==
          doctest::Approx(0.7));
    const MeasurementBasis xb = MeasurementBasis::x_basis();
    CHECK(kcv::single_time_prob(kPlus, xb, Outcome::u1) == doctest::Approx(1.0));
    CHECK(kcv::single_time_prob(kPlus, xb, Outcome::u2) == doctest::Approx(0.0));

    // case I single-time closed form p_+(t) = 1/2 + e^{-G/2} cos(t)/2
    const RateProfile prof = lobe_profile();
    for (double t : {2.7, 11.0, 26.4}) {
        const QubitState s = kcv::propagate_closed_form(kPlus, 0.0, t, prof, 1.0);
        const double expected = 0.5 + 0.5 * std::exp(-0.5 * prof.G_at(t)) * std::cos(t);
        CHECK(std::abs(kcv::single_time_prob(s, xb, Outcome::u1) - expected) < 1e-12);
    }
}

TEST_CASE("post-measurement states and normalization") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uth(0.0, kPi), uph(0.0, 2.0 * kPi);
    for (int k = 0; k < 20; ++k) {
        const MeasurementBasis b(uth(rng), uph(rng));
        const QubitState u1 = kcv::post_measurement_state(b, Outcome::u1);
        const QubitState u2 = kcv::post_measurement_state(b, Outcome::u2);
        // projector states are pure and orthogonal
        CHECK(std::abs(kcv::bloch_radius(u1) - 1.0) < 1e-12);
        CHECK(std::abs(u1.a + u2.a - 1.0) < 1e-15);
        CHECK(std::abs(u1.c + u2.c) < 1e-15);
        // measuring a projector state reproduces it deterministically
        CHECK(kcv::single_time_prob(u1, b, Outcome::u1) == doctest::Approx(1.0));
    }
}

TEST_CASE("repeated measurement at equal times is deterministic") {
    const RateProfile prof = lobe_profile();
    const MeasurementBasis b(1.1, 0.4);
    CHECK(kcv::conditional_prob(b, Outcome::u1, 4.0, 4.0, Outcome::u1, prof, kHz, kOpts) == 1.0);
    CHECK(kcv::conditional_prob(b, Outcome::u1, 4.0, 4.0, Outcome::u2, prof, kHz, kOpts) == 0.0);
}

TEST_CASE("case I conditional probabilities match the closed form") {
    const RateProfile prof = lobe_profile();
    const MeasurementBasis xb = MeasurementBasis::x_basis();
    for (const auto& [t1, t2] : {std::pair{3.0, 9.0}, std::pair{10.5, 24.0}}) {
        const double damp = 0.5 * std::exp(-0.5 * (prof.G_at(t2) - prof.G_at(t1)));
        const double expected_plus = 0.5 + damp * std::cos(t2 - t1);
        const double expected_minus = 0.5 - damp * std::cos(t2 - t1);
        CHECK(std::abs(kcv::conditional_prob(xb, Outcome::u1, t1, t2, Outcome::u1, prof, kHz,
                                             kOpts) -
                       expected_plus) < 1e-12);
        CHECK(std::abs(kcv::conditional_prob(xb, Outcome::u2, t1, t2, Outcome::u1, prof, kHz,
                                             kOpts) -
                       expected_minus) < 1e-12);
    }
}

TEST_CASE("pointer-basis conditionals are coherence-free") {
    const RateProfile prof = lobe_profile();
    const MeasurementBasis b0(0.0, 0.0);
    // phi is irrelevant at the pole; the basis canonicalizes it away
    const MeasurementBasis b0_phi(0.0, 2.3);
    CHECK(b0_phi.phi == 0.0);
    const double p = kcv::conditional_prob(b0, Outcome::u1, 2.0, 8.0, Outcome::u1, prof, kHz,
                                           kOpts);
    // populations evolve autonomously: same result from the population ODE
    const QubitState from_zero = kcv::propagate_closed_form(QubitState{1.0, 0.0}, 2.0, 8.0, prof,
                                                            1.0);
    CHECK(std::abs(p - from_zero.a) < 1e-13);
}

TEST_CASE("pointer-basis measurement of sigma-z dynamics is non-invasive") {
    const RateProfile prof = lobe_profile();
    const kcv::ViolResult v = kcv::kcc_violation(QubitState{0.8, cplx(0.12, -0.2)},
                                                 MeasurementBasis::pointer(), 6.0, 17.0, prof,
                                                 kHz, kOpts);
    CHECK(v.viol < 1e-12);
}

TEST_CASE("violation vanishes at sine-factor zeros") {
    const RateProfile prof = lobe_profile();
    for (int k = 1; k <= 9; ++k) {
        const double t1 = k * kPi;
        const double t2 = std::min(t1 + 1.3, 30.0);
        CHECK(kcv::kcc_violation(kPlus, MeasurementBasis::x_basis(), t1, t2, prof, kHz, kOpts)
                  .viol < 1e-10);
        // interval multiples of pi as well
        const double t2b = t1 <= 30.0 - kPi ? t1 + kPi : 30.0;
        if (t2b > t1)
            CHECK(kcv::kcc_violation_closed_form(t1, t2b, prof, 1.0).viol < 1e-10);
    }
}

TEST_CASE("probability tree equals the closed form for case I") {
    const RateProfile prof = lobe_profile();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int k = 0; k < 50; ++k) {
        double t1 = u(rng), t2 = u(rng);
        if (t2 < t1) std::swap(t1, t2);
        const kcv::ViolResult tree =
            kcv::kcc_violation(kPlus, MeasurementBasis::x_basis(), t1, t2, prof, kHz, kOpts);
        const kcv::ViolResult closed = kcv::kcc_violation_closed_form(t1, t2, prof, 1.0);
        CHECK(std::abs(tree.viol - closed.viol) < 1e-8);
        // population channel must not contribute in the x basis
        CHECK(std::abs(tree.P_term) < 1e-12);
        CHECK(std::abs(tree.viol - std::abs(tree.P_term + tree.C_term)) < 1e-15);
    }
}

TEST_CASE("outcome symmetry of the violation") {
    const RateProfile prof = lobe_profile();
    const MeasurementBasis xb = MeasurementBasis::x_basis();
    for (const auto& [t1, t2] : {std::pair{4.4, 13.0}, std::pair{8.3, 29.0}}) {
        // assemble viol for each outcome directly from the probability tree
        const QubitState at1 = kcv::propagate_closed_form(kPlus, 0.0, t1, prof, 1.0);
        const QubitState at2 = kcv::propagate_closed_form(at1, t1, t2, prof, 1.0);
        const double p1 = kcv::single_time_prob(at1, xb, Outcome::u1);
        double mix_u1 = 0.0, mix_u2 = 0.0;
        for (int o1 = 0; o1 < 2; ++o1) {
            const double w = o1 == 0 ? p1 : 1.0 - p1;
            mix_u1 += w * kcv::conditional_prob(xb, static_cast<Outcome>(o1), t1, t2, Outcome::u1,
                                                prof, kHz, kOpts);
            mix_u2 += w * kcv::conditional_prob(xb, static_cast<Outcome>(o1), t1, t2, Outcome::u2,
                                                prof, kHz, kOpts);
        }
        const double viol_u1 = std::abs(kcv::single_time_prob(at2, xb, Outcome::u1) - mix_u1);
        const double viol_u2 = std::abs(kcv::single_time_prob(at2, xb, Outcome::u2) - mix_u2);
        CHECK(std::abs(viol_u1 - viol_u2) < 1e-15);
        CHECK(std::abs(mix_u1 + mix_u2 - 1.0) < 1e-12); // joint normalization
    }
}

TEST_CASE("closed-form landmarks") {
    // no damping, quarter-period spacing: maximal violation 1/2
    const RateProfile free_prof = oracle::injected_profile(
        10.0, 1000, [](double) { return 0.0; }, [](double) { return 0.0; });
    CHECK(std::abs(kcv::kcc_violation_closed_form(kPi / 2.0, kPi, free_prof, 1.0).viol - 0.5) <
          1e-12);

    // G(0,t2) = 2 ln 2 with unit sine factor gives exactly 1/4
    const double lam0 = 2.0 * std::log(2.0) / kPi; // G(0, pi) = 2 ln 2
    const RateProfile const_prof = oracle::injected_profile(
        10.0, 1000, [&](double) { return lam0 / 2.0; }, [&](double) { return lam0 / 2.0; });
    const kcv::ViolResult v = kcv::kcc_violation_closed_form(kPi / 2.0, kPi, const_prof, 1.0);
    CHECK(std::abs(v.viol - 0.25) < 1e-10);
    REQUIRE(v.S_factor.has_value());
    CHECK(std::abs(*v.S_factor - 1.0) < 1e-12);
}

TEST_CASE("factorized form and upper bound") {
    const RateProfile prof = lobe_profile();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int k = 0; k < 25; ++k) {
        double t1 = u(rng), t2 = u(rng);
        if (t2 < t1) std::swap(t1, t2);
        const kcv::ViolResult v = kcv::kcc_violation_closed_form(t1, t2, prof, 1.0);
        REQUIRE(v.M_t2.has_value());
        // e^{-M/2} S e^{+N/2} equals the direct expression
        const double factorized =
            0.5 * std::exp(-0.5 * *v.M_t2) * std::exp(0.5 * *v.N_t2) * *v.S_factor;
        CHECK(std::abs(factorized - v.viol) < 1e-12);
        CHECK(v.viol <= kcv::viol_upper_bound(prof, t2) + 1e-12);
    }
    // bound landmarks: M = N gives 1/2; the bound is reported unclipped
    const RateProfile free_prof = oracle::injected_profile(
        10.0, 100, [](double) { return 0.0; }, [](double) { return 0.0; });
    CHECK(kcv::viol_upper_bound(free_prof, 5.0) == doctest::Approx(0.5));
    const RateProfile neg = oracle::injected_profile(
        10.0, 1000, [](double) { return -0.1; }, [](double) { return -0.1; });
    CHECK(kcv::viol_upper_bound(neg, 5.0) > 0.5); // N > M regime, not clipped
    const RateProfile pos = oracle::injected_profile(
        10.0, 1000, [](double) { return 0.2; }, [](double) { return 0.2; });
    CHECK(kcv::viol_upper_bound(pos, 5.0) == doctest::Approx(0.5 * std::exp(-1.0)));
}

TEST_CASE("violation under a sigma-x drive stays assembled from valid branches") {
    const RateProfile prof = lobe_profile();
    const Hamiltonian driven{1.0, 0.5};
    const kcv::ViolResult v = kcv::kcc_violation(QubitState{1.0, 0.0},
                                                 MeasurementBasis::pointer(), 6.0, 14.0, prof,
                                                 driven, kOpts);
    CHECK(v.viol >= 0.0);
    CHECK(v.viol < 1.0);
    CHECK(!v.S_factor.has_value()); // no case I factorization for the driven case
}

TEST_CASE("basis validation") {
    CHECK_THROWS_AS(MeasurementBasis(-0.1, 0.0), kcv::error);
    CHECK_THROWS_AS(MeasurementBasis(3.5, 0.0), kcv::error);
    CHECK(MeasurementBasis(kPi, 1.7).phi == 0.0);
}

TEST_CASE("time-order validation") {
    const RateProfile prof = lobe_profile();
    CHECK_THROWS_AS(kcv::kcc_violation_closed_form(5.0, 3.0, prof, 1.0), kcv::error);
    CHECK_THROWS_AS(kcv::kcc_violation(kPlus, MeasurementBasis::x_basis(), -1.0, 3.0, prof, kHz,
                                       kOpts),
                    kcv::error);
}

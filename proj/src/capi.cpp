#include "kcviol/kcviol.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "kcv/check.hpp"
#include "kcv/config.hpp"
#include "kcv/dynamics.hpp"
#include "kcv/error.hpp"
#include "kcv/experiment.hpp"
#include "kcv/kcc.hpp"
#include "kcv/nonmarkov.hpp"
#include "kcv/thermo.hpp"
#include "kcv/witnesses.hpp"

struct kcv_profile {
    kcv::RateProfile impl;
};
struct kcv_config {
    kcv::ExperimentConfig impl;
};

namespace {

thread_local std::string g_last_error;

kcv_status map_errc(kcv::errc c) {
    switch (c) {
        case kcv::errc::invalid_argument: return KCV_ERR_INVALID_ARGUMENT;
        case kcv::errc::domain: return KCV_ERR_DOMAIN;
        case kcv::errc::range: return KCV_ERR_RANGE;
        case kcv::errc::numeric: return KCV_ERR_NUMERIC;
        case kcv::errc::positivity: return KCV_ERR_POSITIVITY;
        case kcv::errc::conditioning: return KCV_ERR_CONDITIONING;
        case kcv::errc::invariant: return KCV_ERR_INVARIANT;
        case kcv::errc::parse: return KCV_ERR_PARSE;
        case kcv::errc::io: return KCV_ERR_IO;
    }
    return KCV_ERR_INTERNAL;
}

template <typename Fn>
kcv_status guarded(Fn&& fn) {
    try {
        fn();
        return KCV_OK;
    } catch (const kcv::error& e) {
        g_last_error = e.what();
        return map_errc(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return KCV_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return KCV_ERR_INTERNAL;
    }
}

kcv_status require(bool ok, const char* what) {
    if (ok) return KCV_OK;
    g_last_error = what;
    return KCV_ERR_INVALID_ARGUMENT;
}

#define KCV_REQUIRE(cond)                                             \
    if (kcv_status st_ = require((cond), "null argument: " #cond); st_ != KCV_OK) return st_

kcv::BathParams to_cpp(const kcv_bath_params& p) {
    return kcv::BathParams{p.s, p.alpha, p.omega_c, p.beta, p.epsilon};
}
kcv::QubitState to_cpp(const kcv_state& s) { return kcv::QubitState{s.a, {s.re_c, s.im_c}}; }
kcv_state to_c(const kcv::QubitState& s) { return kcv_state{s.a, s.c.real(), s.c.imag()}; }
kcv::Hamiltonian to_cpp(const kcv_hamiltonian& h) { return kcv::Hamiltonian{h.omega0, h.Omega}; }
kcv::MeasurementBasis to_cpp(const kcv_basis& b) { return kcv::MeasurementBasis(b.theta, b.phi); }
kcv::Outcome to_outcome(int o) {
    if (o != 0 && o != 1) kcv::fail(kcv::errc::invalid_argument, "outcome must be 0 or 1");
    return o == 0 ? kcv::Outcome::u1 : kcv::Outcome::u2;
}
kcv::PropagationOptions to_opts(double ode_step, int permissive) {
    kcv::PropagationOptions o;
    if (ode_step > 0.0) o.ode_step = ode_step;
    o.positivity = permissive ? kcv::PositivityMode::permissive : kcv::PositivityMode::strict;
    return o;
}

void fill_viol(const kcv::ViolResult& r, kcv_viol_result* out) {
    out->viol = r.viol;
    out->P_term = r.P_term;
    out->C_term = r.C_term;
    out->has_case1_factors = r.S_factor.has_value() ? 1 : 0;
    out->S_factor = r.S_factor.value_or(0.0);
    out->M_t2 = r.M_t2.value_or(0.0);
    out->N_t2 = r.N_t2.value_or(0.0);
}

kcv::LgiReport lgi_to_cpp(const kcv_lgi_report& r) {
    kcv::LgiReport out;
    out.C_01 = r.C_01;
    out.C_12 = r.C_12;
    out.C_02 = r.C_02;
    out.K3 = r.K3;
    out.K3_classical = r.K3_classical;
    out.factorization_gap = r.factorization_gap;
    out.viol = r.viol;
    out.decomposition_residual = r.decomposition_residual;
    out.max_tree_deviation = r.max_tree_deviation;
    out.lgi_violated = r.lgi_violated != 0;
    return out;
}

void fill_blp(const kcv::BlpReport& r, kcv_blp_report* out) {
    out->N_blp = r.N_blp;
    out->N1_tilde = r.N1_tilde;
    out->N2_tilde = r.N2_tilde;
    out->A_plus = r.A_plus;
    out->lower = r.lower;
    out->upper = r.upper;
    out->viol = r.viol;
    out->N_sup = r.N_sup;
    out->numeric_backflow = r.numeric_backflow;
    out->numeric_delta = r.numeric_delta;
}

} // namespace

extern "C" {

const char* kcv_status_name(kcv_status status) {
    switch (status) {
        case KCV_OK: return "ok";
        case KCV_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case KCV_ERR_DOMAIN: return "domain";
        case KCV_ERR_RANGE: return "range";
        case KCV_ERR_NUMERIC: return "numeric";
        case KCV_ERR_POSITIVITY: return "positivity";
        case KCV_ERR_CONDITIONING: return "conditioning";
        case KCV_ERR_INVARIANT: return "invariant";
        case KCV_ERR_PARSE: return "parse";
        case KCV_ERR_IO: return "io";
        case KCV_ERR_INTERNAL: return "internal";
    }
    return "?";
}

const char* kcv_last_error(void) { return g_last_error.c_str(); }

const char* kcv_version(void) { return "1.0.0"; }

void kcv_bath_params_default(kcv_bath_params* out) {
    if (!out) return;
    const kcv::BathParams d{};
    *out = kcv_bath_params{d.s, d.alpha, d.omega_c, d.beta, d.epsilon};
}

kcv_status kcv_spectral_density(double omega, const kcv_bath_params* params, double* out) {
    KCV_REQUIRE(params && out);
    return guarded([&] { *out = kcv::spectral_density(omega, to_cpp(*params)); });
}

kcv_status kcv_thermal_occupation(double omega, double beta, double* out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = kcv::thermal_occupation(omega, beta); });
}

kcv_status kcv_decay_rates(double t, const kcv_bath_params* params, double abs_tol, double* gamma,
                           double* gamma_tilde) {
    KCV_REQUIRE(params && gamma && gamma_tilde);
    return guarded([&] {
        const kcv::DecayRates r =
            kcv::decay_rates(t, to_cpp(*params), abs_tol > 0.0 ? abs_tol : 1e-9);
        *gamma = r.gamma;
        *gamma_tilde = r.gamma_tilde;
    });
}

kcv_status kcv_profile_build(const kcv_bath_params* params, double horizon, int n_steps,
                             kcv_profile** out) {
    KCV_REQUIRE(params && out);
    return guarded([&] {
        *out = new kcv_profile{kcv::build_rate_profile(to_cpp(*params), horizon, n_steps)};
    });
}

kcv_status kcv_profile_from_rates(double horizon, const double* Gamma, const double* gamma_tilde,
                                  size_t n_samples, kcv_profile** out) {
    KCV_REQUIRE(Gamma && gamma_tilde && out);
    return guarded([&] {
        std::vector<double> g(Gamma, Gamma + n_samples);
        std::vector<double> gt(gamma_tilde, gamma_tilde + n_samples);
        *out = new kcv_profile{kcv::RateProfile::from_rates(horizon, std::move(g), std::move(gt))};
    });
}

void kcv_profile_free(kcv_profile* profile) { delete profile; }

kcv_status kcv_profile_size(const kcv_profile* profile, size_t* out) {
    KCV_REQUIRE(profile && out);
    *out = profile->impl.size();
    return KCV_OK;
}

kcv_status kcv_profile_horizon(const kcv_profile* profile, double* out) {
    KCV_REQUIRE(profile && out);
    *out = profile->impl.horizon();
    return KCV_OK;
}

kcv_status kcv_profile_row(const kcv_profile* profile, size_t index, kcv_rate_point* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] {
        const kcv::RateProfile& p = profile->impl;
        if (index >= p.size()) kcv::fail(kcv::errc::range, "profile row index out of range");
        *out = kcv_rate_point{p.t[index],     p.gamma[index], p.gamma_tilde[index],
                              p.Gamma[index], p.lambda[index], p.G[index],
                              p.M[index],     p.N[index],      p.A_plus[index]};
    });
}

kcv_status kcv_profile_eval(const kcv_profile* profile, double t, kcv_rate_point* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] {
        const kcv::RateProfile& p = profile->impl;
        const double gt = p.gamma_tilde_at(t);
        const double Gam = p.Gamma_at(t);
        *out = kcv_rate_point{t,          0.5 * (Gam + gt), gt,       Gam,       p.lambda_at(t),
                              p.G_at(t),  p.M_at(t),        p.N_at(t), p.A_plus_at(t)};
    });
}

kcv_status kcv_profile_write_csv(const kcv_profile* profile, const char* path) {
    KCV_REQUIRE(profile && path);
    return guarded([&] {
        std::ofstream os(path, std::ios::binary);
        if (!os) kcv::fail(kcv::errc::io, std::string("cannot open ") + path);
        profile->impl.write_csv(os);
    });
}

kcv_status kcv_bloch_radius(const kcv_state* state, double* out) {
    KCV_REQUIRE(state && out);
    *out = kcv::bloch_radius(to_cpp(*state));
    return KCV_OK;
}

kcv_status kcv_propagate_closed_form(const kcv_state* state, double t0, double t1,
                                     const kcv_profile* profile, double omega0, kcv_state* out) {
    KCV_REQUIRE(state && profile && out);
    return guarded([&] {
        *out = to_c(kcv::propagate_closed_form(to_cpp(*state), t0, t1, profile->impl, omega0));
    });
}

kcv_status kcv_propagate_ode(const kcv_state* state, const kcv_hamiltonian* H, double t0,
                             double t1, const kcv_profile* profile, double step, int permissive,
                             kcv_state* out, double* first_violation) {
    KCV_REQUIRE(state && H && profile && out);
    return guarded([&] {
        const kcv::OdeResult r = kcv::propagate_ode(
            to_cpp(*state), to_cpp(*H), t0, t1, profile->impl, step,
            permissive ? kcv::PositivityMode::permissive : kcv::PositivityMode::strict);
        *out = to_c(r.state);
        if (first_violation)
            *first_violation = r.first_violation_time.value_or(
                std::numeric_limits<double>::quiet_NaN());
    });
}

kcv_status kcv_write_trajectory_csv(const char* path, const kcv_state* initial,
                                    const kcv_hamiltonian* H, const kcv_profile* profile,
                                    double ode_step, int permissive) {
    KCV_REQUIRE(path && initial && H && profile);
    return guarded([&] {
        std::ofstream os(path, std::ios::binary);
        if (!os) kcv::fail(kcv::errc::io, std::string("cannot open ") + path);
        kcv::write_trajectory_csv(os, to_cpp(*initial), to_cpp(*H), profile->impl,
                                  to_opts(ode_step, permissive));
    });
}

kcv_status kcv_single_time_prob(const kcv_state* state, const kcv_basis* basis, int outcome,
                                double* out) {
    KCV_REQUIRE(state && basis && out);
    return guarded(
        [&] { *out = kcv::single_time_prob(to_cpp(*state), to_cpp(*basis), to_outcome(outcome)); });
}

kcv_status kcv_post_measurement_state(const kcv_basis* basis, int outcome, kcv_state* out) {
    KCV_REQUIRE(basis && out);
    return guarded(
        [&] { *out = to_c(kcv::post_measurement_state(to_cpp(*basis), to_outcome(outcome))); });
}

kcv_status kcv_conditional_prob(const kcv_basis* basis, int outcome1, double t1, double t2,
                                int outcome2, const kcv_profile* profile,
                                const kcv_hamiltonian* H, double ode_step, int permissive,
                                double* out) {
    KCV_REQUIRE(basis && profile && H && out);
    return guarded([&] {
        *out = kcv::conditional_prob(to_cpp(*basis), to_outcome(outcome1), t1, t2,
                                     to_outcome(outcome2), profile->impl, to_cpp(*H),
                                     to_opts(ode_step, permissive));
    });
}

kcv_status kcv_kcc_violation(const kcv_state* initial, const kcv_basis* basis, double t1,
                             double t2, const kcv_profile* profile, const kcv_hamiltonian* H,
                             double ode_step, int permissive, kcv_viol_result* out) {
    KCV_REQUIRE(initial && basis && profile && H && out);
    return guarded([&] {
        fill_viol(kcv::kcc_violation(to_cpp(*initial), to_cpp(*basis), t1, t2, profile->impl,
                                     to_cpp(*H), to_opts(ode_step, permissive)),
                  out);
    });
}

kcv_status kcv_kcc_violation_closed_form(double t1, double t2, const kcv_profile* profile,
                                         double omega0, kcv_viol_result* out) {
    KCV_REQUIRE(profile && out);
    return guarded(
        [&] { fill_viol(kcv::kcc_violation_closed_form(t1, t2, profile->impl, omega0), out); });
}

kcv_status kcv_viol_upper_bound(const kcv_profile* profile, double t2, double* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] { *out = kcv::viol_upper_bound(profile->impl, t2); });
}

kcv_status kcv_rhp_measure(const kcv_profile* profile, double T, double* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] { *out = kcv::rhp_measure(profile->impl, T); });
}

kcv_status kcv_rhp_measure_per_channel(const kcv_profile* profile, double T, double* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] { *out = kcv::rhp_measure_per_channel(profile->impl, T); });
}

kcv_status kcv_viol_rhp_identity(double t1, double t2, const kcv_profile* profile, double omega0,
                                 double* reconstructed, double* direct) {
    KCV_REQUIRE(profile && reconstructed && direct);
    return guarded([&] {
        const auto [r, d] = kcv::viol_rhp_identity(t1, t2, profile->impl, omega0);
        *reconstructed = r;
        *direct = d;
    });
}

kcv_status kcv_trace_distance(const kcv_state* s1, const kcv_state* s2, double* out) {
    KCV_REQUIRE(s1 && s2 && out);
    *out = kcv::trace_distance(to_cpp(*s1), to_cpp(*s2));
    return KCV_OK;
}

kcv_status kcv_blp_measure(const kcv_profile* profile, double T, int delta_grid_points,
                           kcv_blp_report* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] {
        fill_blp(kcv::blp_measure(profile->impl, T, delta_grid_points > 0 ? delta_grid_points : 61),
                 out);
    });
}

kcv_status kcv_blp_viol_sandwich(double t1, double t2, const kcv_profile* profile, double omega0,
                                 kcv_blp_report* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] { fill_blp(kcv::blp_viol_sandwich(t1, t2, profile->impl, omega0), out); });
}

kcv_status kcv_von_neumann_entropy(const kcv_state* state, double* out) {
    KCV_REQUIRE(state && out);
    *out = kcv::von_neumann_entropy(to_cpp(*state));
    return KCV_OK;
}

kcv_status kcv_mutual_information(const kcv_state* state, double* out) {
    KCV_REQUIRE(state && out);
    *out = kcv::mutual_information(to_cpp(*state));
    return KCV_OK;
}

kcv_status kcv_mi_from_viol(double viol, double a_t2, double t1, double t2, double omega0,
                            double* out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = kcv::mi_from_viol(viol, a_t2, t1, t2, omega0); });
}

kcv_status kcv_fano_factor(const kcv_state* state, double* out) {
    KCV_REQUIRE(state && out);
    *out = kcv::fano_factor(to_cpp(*state));
    return KCV_OK;
}

kcv_status kcv_heat(double t2, const kcv_profile* profile, double omega0, double* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] { *out = kcv::heat(t2, profile->impl, omega0); });
}

kcv_status kcv_heat_viol_identity(double viol, double t1, double t2, const kcv_profile* profile,
                                  double omega0, double* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] { *out = kcv::heat_viol_identity(viol, t1, t2, profile->impl, omega0); });
}

kcv_status kcv_viol_witness_pure_decay(double Q, double S, double omega0, double* out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = kcv::viol_witness_pure_decay(Q, S, omega0); });
}

kcv_status kcv_viol_witness_pure_excitation(double Q, double S, double omega0, double* out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = kcv::viol_witness_pure_excitation(Q, S, omega0); });
}

kcv_status kcv_viol_witness_from_sigma(double sigma, double lambda, double S, double* out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = kcv::viol_witness_from_sigma(sigma, lambda, S); });
}

kcv_status kcv_viol_witness_from_heat_rate(double Q_rate, double lambda, double S, double* out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = kcv::viol_witness_from_heat_rate(Q_rate, lambda, S); });
}

kcv_status kcv_entropy_production_state(const kcv_state* state, double Gamma_t, double lambda_t,
                                        double beta, double omega0, kcv_sigma_result* out) {
    KCV_REQUIRE(state && out);
    return guarded([&] {
        const kcv::SigmaResult r =
            kcv::entropy_production_state(to_cpp(*state), Gamma_t, lambda_t, beta, omega0);
        *out = kcv_sigma_result{r.sigma, r.dS_dt, r.heat_rate};
    });
}

kcv_status kcv_entropy_production_rate(double t, const kcv_profile* profile, double beta,
                                       double omega0, kcv_sigma_result* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] {
        const kcv::SigmaResult r = kcv::entropy_production_rate(t, profile->impl, beta, omega0);
        *out = kcv_sigma_result{r.sigma, r.dS_dt, r.heat_rate};
    });
}

kcv_status kcv_entropy_production_approx(double t1, double t2, const kcv_profile* profile,
                                         double beta, double omega0, kcv_sigma_approx* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] {
        const kcv::SigmaApprox r =
            kcv::entropy_production_approx(t1, t2, profile->impl, beta, omega0);
        *out = kcv_sigma_approx{r.approx, r.exact, r.deviation};
    });
}

kcv_status kcv_kd_distribution(double t1, double t2, const kcv_basis* basis,
                               const kcv_state* initial, const kcv_profile* profile,
                               const kcv_hamiltonian* H, double ode_step, int permissive,
                               kcv_kd_table* out) {
    KCV_REQUIRE(basis && initial && profile && H && out);
    return guarded([&] {
        const kcv::KdTable t = kcv::kd_distribution(t1, t2, to_cpp(*basis), to_cpp(*initial),
                                                    profile->impl, to_cpp(*H),
                                                    to_opts(ode_step, permissive));
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) {
                out->kd_re[b][a] = t.kd[b][a].real();
                out->kd_im[b][a] = t.kd[b][a].imag();
                out->classical[b][a] = t.classical[b][a];
                out->interference_re[b][a] = t.interference[b][a].real();
                out->interference_im[b][a] = t.interference[b][a].imag();
            }
        out->p_t1[0] = t.p_t1[0];
        out->p_t1[1] = t.p_t1[1];
        out->p_t2[0] = t.p_t2[0];
        out->p_t2[1] = t.p_t2[1];
        out->max_abs_interference = t.max_abs_interference();
    });
}

kcv_status kcv_kd_kcc_identity(const kcv_kd_table* table, int outcome_b, double* out) {
    KCV_REQUIRE(table && out);
    return guarded([&] {
        if (outcome_b != 0 && outcome_b != 1)
            kcv::fail(kcv::errc::invalid_argument, "outcome_b must be 0 or 1");
        const double re = table->interference_re[outcome_b][0] + table->interference_re[outcome_b][1];
        const double im = table->interference_im[outcome_b][0] + table->interference_im[outcome_b][1];
        *out = std::sqrt(re * re + im * im);
    });
}

kcv_status kcv_lgi_correlators(double t1, double t2, const kcv_profile* profile, double omega0,
                               kcv_lgi_report* out) {
    KCV_REQUIRE(profile && out);
    return guarded([&] {
        const kcv::LgiReport r = kcv::lgi_correlators(t1, t2, profile->impl, omega0);
        *out = kcv_lgi_report{r.C_01,
                              r.C_12,
                              r.C_02,
                              r.K3,
                              r.K3_classical,
                              r.factorization_gap,
                              r.viol,
                              r.decomposition_residual,
                              r.max_tree_deviation,
                              r.lgi_violated ? 1 : 0};
    });
}

kcv_status kcv_k3_decomposition(const kcv_lgi_report* report, double* out) {
    KCV_REQUIRE(report && out);
    return guarded([&] { *out = kcv::k3_decomposition(lgi_to_cpp(*report)); });
}

kcv_status kcv_config_create(kcv_config** out) {
    KCV_REQUIRE(out);
    return guarded([&] { *out = new kcv_config{kcv::ExperimentConfig::defaults()}; });
}

kcv_status kcv_config_parse_file(const char* path, kcv_config** out) {
    KCV_REQUIRE(path && out);
    return guarded([&] {
        std::ifstream is(path, std::ios::binary);
        if (!is) kcv::fail(kcv::errc::io, std::string("cannot read ") + path);
        std::ostringstream ss;
        ss << is.rdbuf();
        *out = new kcv_config{kcv::parse_config(ss.str())};
    });
}

kcv_status kcv_config_parse_string(const char* text, kcv_config** out) {
    KCV_REQUIRE(text && out);
    return guarded([&] { *out = new kcv_config{kcv::parse_config(text)}; });
}

kcv_status kcv_config_set(kcv_config* config, const char* key, const char* value) {
    KCV_REQUIRE(config && key && value);
    return guarded([&] {
        kcv::apply_setting(config->impl, key, value);
        // full validation happens at run time; cheap local checks only
    });
}

void kcv_config_free(kcv_config* config) { delete config; }

kcv_status kcv_run_experiment(const kcv_config* config, const char* out_dir, int jobs,
                              int* n_errors, int* exit_code) {
    KCV_REQUIRE(config);
    return guarded([&] {
        kcv::ExperimentConfig cfg = config->impl;
        if (out_dir) cfg.out_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        const kcv::ExperimentResult r = kcv::run_experiment(cfg);
        if (n_errors) *n_errors = static_cast<int>(r.errors.size());
        if (exit_code) *exit_code = r.exit_code;
    });
}

kcv_status kcv_check_run(kcv_check_callback cb, void* user, int* n_failed) {
    return guarded([&] {
        int failed = 0;
        for (const kcv::check::CriterionResult& r : kcv::check::run_all()) {
            if (!r.passed) ++failed;
            if (cb) cb(user, r.id, r.name.c_str(), r.passed ? 1 : 0, r.details.c_str(), r.seconds);
        }
        if (n_failed) *n_failed = failed;
    });
}

} // extern "C"

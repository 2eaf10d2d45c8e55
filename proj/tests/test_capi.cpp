// Exercises the extern-C surface of libkcviol the way an external consumer
// would: opaque handles, status codes, thread-local error messages.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "kcviol/kcviol.h"

namespace {

int g_failures = 0;

#define CHECK_TRUE(cond)                                                        \
    do {                                                                        \
        if (!(cond)) {                                                          \
            std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);         \
            ++g_failures;                                                       \
        }                                                                       \
    } while (0)

#define CHECK_OK(call) CHECK_TRUE((call) == KCV_OK)

#define CHECK_NEAR(a, b, tol) CHECK_TRUE(std::fabs((a) - (b)) <= (tol))

} // namespace

int main() {
    CHECK_TRUE(std::strcmp(kcv_version(), "") != 0);
    CHECK_TRUE(std::strcmp(kcv_status_name(KCV_ERR_PARSE), "parse") == 0);

    // -------------------------------------------------------------- errors
    double x = 0.0;
    CHECK_TRUE(kcv_spectral_density(1.0, nullptr, &x) == KCV_ERR_INVALID_ARGUMENT);
    CHECK_TRUE(std::strlen(kcv_last_error()) > 0);

    kcv_bath_params bath;
    kcv_bath_params_default(&bath);
    CHECK_NEAR(bath.s, 1.5, 0.0);
    CHECK_NEAR(bath.beta, 1.0 / 300.0, 1e-18);
    CHECK_TRUE(kcv_spectral_density(-1.0, &bath, &x) == KCV_ERR_DOMAIN);

    // ---------------------------------------------------------------- bath
    bath.omega_c = 1.0;
    CHECK_OK(kcv_spectral_density(1.0, &bath, &x));
    CHECK_NEAR(x, 0.18393972058572117, 1e-16);
    CHECK_OK(kcv_thermal_occupation(std::log(2.0), 1.0, &x));
    CHECK_NEAR(x, 1.0, 1e-14);

    double gamma = -1.0, gamma_tilde = -1.0;
    CHECK_OK(kcv_decay_rates(0.0, &bath, 0.0, &gamma, &gamma_tilde));
    CHECK_TRUE(gamma == 0.0 && gamma_tilde == 0.0);

    // ------------------------------------------------------------- profile
    bath.omega_c = 2.0;
    kcv_profile* prof = nullptr;
    CHECK_OK(kcv_profile_build(&bath, 30.0, 3000, &prof));
    size_t n = 0;
    CHECK_OK(kcv_profile_size(prof, &n));
    CHECK_TRUE(n == 3001);
    double horizon = 0.0;
    CHECK_OK(kcv_profile_horizon(prof, &horizon));
    CHECK_NEAR(horizon, 30.0, 0.0);

    kcv_rate_point row;
    CHECK_OK(kcv_profile_row(prof, 500, &row));
    CHECK_NEAR(row.t, 5.0, 1e-12);
    CHECK_NEAR(row.gamma, 0.1529368573, 1e-8);
    CHECK_TRUE(kcv_profile_row(prof, 99999, &row) == KCV_ERR_RANGE);
    CHECK_OK(kcv_profile_eval(prof, 5.0, &row));
    CHECK_NEAR(row.gamma, 0.1529368573, 1e-8);
    CHECK_NEAR(row.M - row.N, row.G, 1e-12);

    const auto csv_path = std::filesystem::temp_directory_path() / "kcv_capi_rates.csv";
    CHECK_OK(kcv_profile_write_csv(prof, csv_path.string().c_str()));
    CHECK_TRUE(std::filesystem::file_size(csv_path) > 1000);
    std::filesystem::remove(csv_path);

    // injected rates: constant lambda = 0.2
    {
        double G[301], gt[301];
        for (int i = 0; i <= 300; ++i) {
            G[i] = 0.1;
            gt[i] = 0.1;
        }
        kcv_profile* inj = nullptr;
        CHECK_OK(kcv_profile_from_rates(15.0, G, gt, 301, &inj));
        kcv_rate_point last;
        CHECK_OK(kcv_profile_row(inj, 300, &last));
        CHECK_NEAR(last.G, 3.0, 1e-12);
        CHECK_NEAR(last.N, 0.0, 0.0);

        // dynamics on the injected profile: fixed point of the population
        const kcv_state plus{0.5, 0.5, 0.0};
        kcv_state out;
        CHECK_OK(kcv_propagate_closed_form(&plus, 0.0, 5.0, inj, 1.0, &out));
        CHECK_NEAR(out.a, 0.5, 1e-12);
        CHECK_NEAR(std::hypot(out.re_c, out.im_c), 0.30326532985631671, 1e-12);

        const kcv_hamiltonian Hz{1.0, 0.0};
        kcv_state ode;
        double first_violation = 0.0;
        CHECK_OK(kcv_propagate_ode(&plus, &Hz, 0.0, 5.0, inj, 1e-3, 0, &ode, &first_violation));
        CHECK_NEAR(ode.a, out.a, 1e-8);
        CHECK_NEAR(ode.re_c, out.re_c, 1e-8);
        CHECK_TRUE(std::isnan(first_violation)); // no violation recorded

        double r = 0.0;
        CHECK_OK(kcv_bloch_radius(&plus, &r));
        CHECK_NEAR(r, 1.0, 1e-15);
        kcv_profile_free(inj);
    }

    // ----------------------------------------------------------------- kcc
    const kcv_basis xb{1.5707963267948966, 0.0};
    const kcv_state plus{0.5, 0.5, 0.0};
    double p = 0.0;
    CHECK_OK(kcv_single_time_prob(&plus, &xb, 0, &p));
    CHECK_NEAR(p, 1.0, 1e-15);
    CHECK_TRUE(kcv_single_time_prob(&plus, &xb, 7, &p) == KCV_ERR_INVALID_ARGUMENT);

    kcv_state collapsed;
    CHECK_OK(kcv_post_measurement_state(&xb, 1, &collapsed));
    CHECK_NEAR(collapsed.a, 0.5, 1e-15);
    CHECK_NEAR(collapsed.re_c, -0.5, 1e-15);

    const kcv_hamiltonian Hz{1.0, 0.0};
    double cond = 0.0;
    CHECK_OK(kcv_conditional_prob(&xb, 0, 4.0, 4.0, 0, prof, &Hz, 1e-3, 1, &cond));
    CHECK_NEAR(cond, 1.0, 0.0);

    kcv_viol_result viol_tree, viol_closed;
    CHECK_OK(kcv_kcc_violation(&plus, &xb, 15.0, 30.0, prof, &Hz, 1e-3, 1, &viol_tree));
    CHECK_OK(kcv_kcc_violation_closed_form(15.0, 30.0, prof, 1.0, &viol_closed));
    CHECK_NEAR(viol_tree.viol, viol_closed.viol, 1e-8);
    CHECK_TRUE(viol_closed.has_case1_factors == 1);
    double bound = 0.0;
    CHECK_OK(kcv_viol_upper_bound(prof, 30.0, &bound));
    CHECK_TRUE(viol_closed.viol <= bound + 1e-12);

    // ----------------------------------------------------------- nonmarkov
    double nrhp = -1.0, nchan = -1.0;
    CHECK_OK(kcv_rhp_measure(prof, 30.0, &nrhp));
    CHECK_OK(kcv_rhp_measure_per_channel(prof, 30.0, &nchan));
    CHECK_TRUE(nrhp >= 0.0 && nchan >= nrhp - 1e-12);
    double rec = 0.0, dir = 0.0;
    CHECK_OK(kcv_viol_rhp_identity(15.0, 30.0, prof, 1.0, &rec, &dir));
    CHECK_NEAR(rec, dir, 1e-10);

    const kcv_state zero{1.0, 0.0, 0.0}, one{0.0, 0.0, 0.0};
    double dist = 0.0;
    CHECK_OK(kcv_trace_distance(&zero, &one, &dist));
    CHECK_NEAR(dist, 1.0, 0.0);

    kcv_blp_report blp;
    CHECK_OK(kcv_blp_viol_sandwich(15.0, 30.0, prof, 1.0, &blp));
    CHECK_TRUE(blp.lower <= blp.viol + 1e-9);
    CHECK_TRUE(blp.viol <= blp.upper + 1e-9);
    CHECK_TRUE(blp.N1_tilde >= 0.5 * blp.N2_tilde - 1e-12);

    // -------------------------------------------------------------- thermo
    const kcv_state mixed{0.5, 0.0, 0.0};
    CHECK_OK(kcv_von_neumann_entropy(&mixed, &x));
    CHECK_NEAR(x, std::log(2.0), 1e-15);
    CHECK_OK(kcv_mutual_information(&mixed, &x));
    CHECK_NEAR(x, std::log(2.0), 1e-15);
    CHECK_OK(kcv_fano_factor(&mixed, &x));
    CHECK_NEAR(x, 0.5, 0.0);
    CHECK_TRUE(kcv_mi_from_viol(0.9, 1.0, 4.0, 10.0, 1.0, &x) == KCV_ERR_INVALID_ARGUMENT);
    CHECK_TRUE(kcv_mi_from_viol(0.1, 0.5, 3.14159265358979323846, 10.0, 1.0, &x) ==
               KCV_ERR_CONDITIONING);

    {
        // symmetric injected rates: heat stays zero, sigma matches the witness
        double G[601], gt[601];
        for (int i = 0; i <= 600; ++i) {
            G[i] = 0.125;
            gt[i] = 0.125;
        }
        kcv_profile* sym = nullptr;
        CHECK_OK(kcv_profile_from_rates(30.0, G, gt, 601, &sym));
        double q = -1.0;
        CHECK_OK(kcv_heat(30.0, sym, 1.0, &q));
        CHECK_NEAR(q, 0.0, 1e-10);

        kcv_viol_result v;
        CHECK_OK(kcv_kcc_violation_closed_form(15.0, 30.0, sym, 1.0, &v));
        double q_id = 0.0;
        CHECK_OK(kcv_heat_viol_identity(v.viol, 15.0, 30.0, sym, 1.0, &q_id));
        CHECK_NEAR(q_id, q, 1e-8);

        kcv_sigma_result sr;
        CHECK_OK(kcv_entropy_production_rate(30.0, sym, 1.0, 1.0, &sr));
        double w = 0.0;
        CHECK_OK(kcv_viol_witness_from_sigma(sr.sigma, 0.25, v.S_factor, &w));
        CHECK_NEAR(w / v.viol, 1.0, 1e-3);

        kcv_sigma_approx ap;
        CHECK_OK(kcv_entropy_production_approx(15.0, 30.0, sym, 1.0, 1.0, &ap));
        CHECK_NEAR(ap.approx / ap.exact, 1.0, 0.1);
        kcv_profile_free(sym);
    }

    // ----------------------------------------------------------- witnesses
    kcv_kd_table kd;
    CHECK_OK(kcv_kd_distribution(15.0, 30.0, &xb, &plus, prof, &Hz, 1e-3, 1, &kd));
    for (int b = 0; b < 2; ++b) {
        const double re = kd.kd_re[b][0] + kd.kd_re[b][1];
        CHECK_NEAR(re, kd.p_t2[b], 1e-10);
    }
    double kd_viol = 0.0;
    CHECK_OK(kcv_kd_kcc_identity(&kd, 0, &kd_viol));
    CHECK_NEAR(kd_viol, viol_closed.viol, 1e-8);

    kcv_lgi_report lgi;
    CHECK_OK(kcv_lgi_correlators(15.0, 30.0, prof, 1.0, &lgi));
    CHECK_TRUE(lgi.max_tree_deviation < 1e-8);
    double residual = -1.0;
    CHECK_OK(kcv_k3_decomposition(&lgi, &residual));
    CHECK_TRUE(residual < 1e-10);
    CHECK_NEAR(lgi.viol, viol_closed.viol, 1e-12);

    kcv_profile_free(prof);

    // ------------------------------------------------------------- config
    kcv_config* cfg = nullptr;
    CHECK_TRUE(kcv_config_parse_string("bogus = 1\n", &cfg) == KCV_ERR_PARSE);
    CHECK_TRUE(std::string(kcv_last_error()).find("bogus") != std::string::npos);

    CHECK_OK(kcv_config_parse_string(
        "t1 = 4\nt2 = 9\nhorizon = 12\ngrid_steps = 400\nomega_c = 1.0, 3.0\noutputs = viol\n",
        &cfg));
    CHECK_OK(kcv_config_set(cfg, "trajectory", "true"));
    CHECK_TRUE(kcv_config_set(cfg, "nope", "1") == KCV_ERR_PARSE);

    const auto out_dir = std::filesystem::temp_directory_path() / "kcv_capi_run";
    std::filesystem::remove_all(out_dir);
    int n_errors = -1, exit_code = -1;
    CHECK_OK(kcv_run_experiment(cfg, out_dir.string().c_str(), 2, &n_errors, &exit_code));
    CHECK_TRUE(n_errors == 0);
    CHECK_TRUE(exit_code == 0);
    CHECK_TRUE(std::filesystem::exists(out_dir / "summary.csv"));
    CHECK_TRUE(std::filesystem::exists(out_dir / "viol.csv"));
    CHECK_TRUE(std::filesystem::exists(out_dir / "trajectory_0001.csv"));
    std::filesystem::remove_all(out_dir);
    kcv_config_free(cfg);

    if (g_failures == 0) {
        std::printf("capi: all checks passed\n");
        return 0;
    }
    std::printf("capi: %d check(s) failed\n", g_failures);
    return 1;
}

/* kcviol — dissipative-qubit Kolmogorov-consistency toolkit, C API.
 *
 * Every function returns a kcv_status; results travel through out-parameters.
 * Opaque handles (kcv_profile, kcv_config) own their resources and must be
 * released with the matching *_free call. On any failure the thread-local
 * message retrieved by kcv_last_error() describes what went wrong.
 *
 * Conventions: dimensionless units with the qubit frequency omega0 = 1
 * (time in 1/omega0, beta = beta' * hbar * omega0). The qubit state is the
 * density matrix [[a, c], [c*, 1-a]] with c = re_c + i im_c.
 */
#ifndef KCVIOL_H
#define KCVIOL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kcv_status {
    KCV_OK = 0,
    KCV_ERR_INVALID_ARGUMENT = 1,
    KCV_ERR_DOMAIN = 2,
    KCV_ERR_RANGE = 3,
    KCV_ERR_NUMERIC = 4,
    KCV_ERR_POSITIVITY = 5,
    KCV_ERR_CONDITIONING = 6,
    KCV_ERR_INVARIANT = 7,
    KCV_ERR_PARSE = 8,
    KCV_ERR_IO = 9,
    KCV_ERR_INTERNAL = 10
} kcv_status;

const char* kcv_status_name(kcv_status status);

/* Thread-local message for the most recent failing call on this thread. */
const char* kcv_last_error(void);

const char* kcv_version(void);

/* ------------------------------------------------------------------ bath */

typedef struct kcv_bath_params {
    double s;       /* spectral exponent (> 1, super-Ohmic) */
    double alpha;   /* coupling strength */
    double omega_c; /* cutoff frequency */
    double beta;    /* inverse temperature */
    double epsilon; /* transition frequency (resonant: 1) */
} kcv_bath_params;

/* Reference defaults: s = 1.5, alpha = 0.5, omega_c = 2, beta = 1/300,
 * epsilon = 1. */
void kcv_bath_params_default(kcv_bath_params* out);

kcv_status kcv_spectral_density(double omega, const kcv_bath_params* params, double* out);
kcv_status kcv_thermal_occupation(double omega, double beta, double* out);

/* Reduced one-dimensional quadrature of the double rate integral; abs_tol
 * <= 0 selects the default 1e-9. */
kcv_status kcv_decay_rates(double t, const kcv_bath_params* params, double abs_tol,
                           double* gamma, double* gamma_tilde);

/* --------------------------------------------------------------- profile */

typedef struct kcv_profile kcv_profile; /* opaque tabulated-rate handle */

kcv_status kcv_profile_build(const kcv_bath_params* params, double horizon, int n_steps,
                             kcv_profile** out);

/* Injected-rate hook: n_samples uniform samples of Gamma(t) and
 * gamma_tilde(t) over [0, horizon]. */
kcv_status kcv_profile_from_rates(double horizon, const double* Gamma, const double* gamma_tilde,
                                  size_t n_samples, kcv_profile** out);

void kcv_profile_free(kcv_profile* profile);

kcv_status kcv_profile_size(const kcv_profile* profile, size_t* out);
kcv_status kcv_profile_horizon(const kcv_profile* profile, double* out);

typedef struct kcv_rate_point {
    double t, gamma, gamma_tilde, Gamma, lambda, G, M, N, A_plus;
} kcv_rate_point;

/* Row at a grid index. */
kcv_status kcv_profile_row(const kcv_profile* profile, size_t index, kcv_rate_point* out);
/* Interpolated values at an arbitrary time within the horizon. */
kcv_status kcv_profile_eval(const kcv_profile* profile, double t, kcv_rate_point* out);

/* CSV with header t,gamma,gamma_tilde,Gamma,lambda,G,M,N,A_plus at full
 * double precision. */
kcv_status kcv_profile_write_csv(const kcv_profile* profile, const char* path);

/* -------------------------------------------------------------- dynamics */

typedef struct kcv_state {
    double a;    /* population of |0> */
    double re_c; /* Re <0|rho|1> */
    double im_c; /* Im <0|rho|1> */
} kcv_state;

typedef struct kcv_hamiltonian {
    double omega0; /* sigma_z/2 coefficient */
    double Omega;  /* sigma_x drive */
} kcv_hamiltonian;

kcv_status kcv_bloch_radius(const kcv_state* state, double* out);

kcv_status kcv_propagate_closed_form(const kcv_state* state, double t0, double t1,
                                     const kcv_profile* profile, double omega0, kcv_state* out);

/* permissive != 0 records positivity violations instead of failing; the
 * first violation time lands in *first_violation (or NaN if none;
 * first_violation may be NULL). */
kcv_status kcv_propagate_ode(const kcv_state* state, const kcv_hamiltonian* H, double t0,
                             double t1, const kcv_profile* profile, double step, int permissive,
                             kcv_state* out, double* first_violation);

kcv_status kcv_write_trajectory_csv(const char* path, const kcv_state* initial,
                                    const kcv_hamiltonian* H, const kcv_profile* profile,
                                    double ode_step, int permissive);

/* ------------------------------------------------------------------- kcc */

typedef struct kcv_basis {
    double theta; /* polar angle in [0, pi] */
    double phi;   /* azimuth in [0, 2 pi) */
} kcv_basis;

/* outcome: 0 -> u1, 1 -> u2 */
kcv_status kcv_single_time_prob(const kcv_state* state, const kcv_basis* basis, int outcome,
                                double* out);
kcv_status kcv_post_measurement_state(const kcv_basis* basis, int outcome, kcv_state* out);
kcv_status kcv_conditional_prob(const kcv_basis* basis, int outcome1, double t1, double t2,
                                int outcome2, const kcv_profile* profile,
                                const kcv_hamiltonian* H, double ode_step, int permissive,
                                double* out);

typedef struct kcv_viol_result {
    double viol;
    double P_term; /* population contribution */
    double C_term; /* coherence contribution */
    int has_case1_factors;
    double S_factor; /* |sin(w0 t1) sin(w0 (t2-t1))| */
    double M_t2, N_t2;
} kcv_viol_result;

kcv_status kcv_kcc_violation(const kcv_state* initial, const kcv_basis* basis, double t1,
                             double t2, const kcv_profile* profile, const kcv_hamiltonian* H,
                             double ode_step, int permissive, kcv_viol_result* out);
kcv_status kcv_kcc_violation_closed_form(double t1, double t2, const kcv_profile* profile,
                                         double omega0, kcv_viol_result* out);
kcv_status kcv_viol_upper_bound(const kcv_profile* profile, double t2, double* out);

/* ------------------------------------------------------------- nonmarkov */

kcv_status kcv_rhp_measure(const kcv_profile* profile, double T, double* out);
kcv_status kcv_rhp_measure_per_channel(const kcv_profile* profile, double T, double* out);
kcv_status kcv_viol_rhp_identity(double t1, double t2, const kcv_profile* profile, double omega0,
                                 double* reconstructed, double* direct);
kcv_status kcv_trace_distance(const kcv_state* s1, const kcv_state* s2, double* out);

typedef struct kcv_blp_report {
    double N_blp;
    double N1_tilde, N2_tilde;
    double A_plus;
    double lower, upper;
    double viol;
    double N_sup; /* integral of the per-sample maximal backflow rate */
    double numeric_backflow, numeric_delta;
} kcv_blp_report;

kcv_status kcv_blp_measure(const kcv_profile* profile, double T, int delta_grid_points,
                           kcv_blp_report* out);
kcv_status kcv_blp_viol_sandwich(double t1, double t2, const kcv_profile* profile, double omega0,
                                 kcv_blp_report* out);

/* ---------------------------------------------------------------- thermo */

kcv_status kcv_von_neumann_entropy(const kcv_state* state, double* out);
kcv_status kcv_mutual_information(const kcv_state* state, double* out);
kcv_status kcv_mi_from_viol(double viol, double a_t2, double t1, double t2, double omega0,
                            double* out);
kcv_status kcv_fano_factor(const kcv_state* state, double* out);
kcv_status kcv_heat(double t2, const kcv_profile* profile, double omega0, double* out);
kcv_status kcv_heat_viol_identity(double viol, double t1, double t2, const kcv_profile* profile,
                                  double omega0, double* out);
kcv_status kcv_viol_witness_pure_decay(double Q, double S, double omega0, double* out);
kcv_status kcv_viol_witness_pure_excitation(double Q, double S, double omega0, double* out);
kcv_status kcv_viol_witness_from_sigma(double sigma, double lambda, double S, double* out);
kcv_status kcv_viol_witness_from_heat_rate(double Q_rate, double lambda, double S, double* out);

typedef struct kcv_sigma_result {
    double sigma;
    double dS_dt;
    double heat_rate;
} kcv_sigma_result;

kcv_status kcv_entropy_production_state(const kcv_state* state, double Gamma_t, double lambda_t,
                                        double beta, double omega0, kcv_sigma_result* out);
kcv_status kcv_entropy_production_rate(double t, const kcv_profile* profile, double beta,
                                       double omega0, kcv_sigma_result* out);

typedef struct kcv_sigma_approx {
    double approx;
    double exact;
    double deviation;
} kcv_sigma_approx;

kcv_status kcv_entropy_production_approx(double t1, double t2, const kcv_profile* profile,
                                         double beta, double omega0, kcv_sigma_approx* out);

/* ------------------------------------------------------------- witnesses */

typedef struct kcv_kd_table {
    /* index [b][a], b the later outcome; re/im parts of KD(b,a) */
    double kd_re[2][2];
    double kd_im[2][2];
    double classical[2][2];
    double interference_re[2][2];
    double interference_im[2][2];
    double p_t1[2];
    double p_t2[2];
    double max_abs_interference;
} kcv_kd_table;

kcv_status kcv_kd_distribution(double t1, double t2, const kcv_basis* basis,
                               const kcv_state* initial, const kcv_profile* profile,
                               const kcv_hamiltonian* H, double ode_step, int permissive,
                               kcv_kd_table* out);
kcv_status kcv_kd_kcc_identity(const kcv_kd_table* table, int outcome_b, double* out);

typedef struct kcv_lgi_report {
    double C_01, C_12, C_02;
    double K3;
    double K3_classical;      /* C01 + C12 - C01*C12: K3 under factorization */
    double factorization_gap; /* C01*C12 - C02, equal to +/- 2 viol */
    double viol;
    double decomposition_residual;
    double max_tree_deviation;
    int lgi_violated;
} kcv_lgi_report;

kcv_status kcv_lgi_correlators(double t1, double t2, const kcv_profile* profile, double omega0,
                               kcv_lgi_report* out);
kcv_status kcv_k3_decomposition(const kcv_lgi_report* report, double* out);

/* ------------------------------------------------------------ experiment */

typedef struct kcv_config kcv_config; /* opaque experiment configuration */

kcv_status kcv_config_create(kcv_config** out); /* reference defaults */
kcv_status kcv_config_parse_file(const char* path, kcv_config** out);
kcv_status kcv_config_parse_string(const char* text, kcv_config** out);
/* Applies one key = value assignment with the config-file grammar. */
kcv_status kcv_config_set(kcv_config* config, const char* key, const char* value);
void kcv_config_free(kcv_config* config);

/* Runs the sweep; out_dir/jobs, when non-NULL/positive, override the config.
 * *n_errors receives the number of per-point errors recorded in errors.csv;
 * *exit_code receives 0 (clean), 1 (invariant failure) or 3 (numeric). */
kcv_status kcv_run_experiment(const kcv_config* config, const char* out_dir, int jobs,
                              int* n_errors, int* exit_code);

/* Verification suite; cb is invoked once per criterion in order. Returns
 * KCV_OK with *n_failed = 0 when everything passes. */
typedef void (*kcv_check_callback)(void* user, int id, const char* name, int passed,
                                   const char* details, double seconds);
kcv_status kcv_check_run(kcv_check_callback cb, void* user, int* n_failed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KCVIOL_H */

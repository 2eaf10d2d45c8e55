// kcviol command line: experiment runner and verification suite on top of the
// shared-library C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kcviol/kcviol.h"

namespace {

int status_to_exit(kcv_status st) {
    switch (st) {
        case KCV_OK: return 0;
        case KCV_ERR_INVARIANT: return 1;
        case KCV_ERR_PARSE:
        case KCV_ERR_IO:
        case KCV_ERR_INVALID_ARGUMENT: return 2;
        default: return 3;
    }
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct GroupFlags {
    double s = 1.5, alpha = 0.5, T_bath = 300.0, beta = 0.0, epsilon = 1.0;
    double t1 = 15.0, t2 = 30.0, horizon = 30.0, ode_step = 1e-3, Omega = 0.5;
    int grid_steps = 3000, jobs = 1, sweep_points = 20;
    double sweep_min = 0.5, sweep_max = 10.0;
    std::vector<double> omega_c;
    std::string case_name = "case1", out_dir = "out";
    bool trajectory = false;
};

void add_group_flags(CLI::App* cmd, GroupFlags& f) {
    cmd->add_option("--s", f.s, "spectral exponent (> 1)");
    cmd->add_option("--alpha", f.alpha, "coupling strength");
    cmd->add_option("--T-bath", f.T_bath, "bath temperature (beta = 1/T)");
    cmd->add_option("--beta", f.beta, "inverse temperature (overrides --T-bath)");
    cmd->add_option("--epsilon", f.epsilon, "transition frequency");
    cmd->add_option("--t1", f.t1, "first measurement time");
    cmd->add_option("--t2", f.t2, "second measurement time");
    cmd->add_option("--horizon", f.horizon, "profile horizon");
    cmd->add_option("--grid-steps", f.grid_steps, "rate grid steps");
    cmd->add_option("--ode-step", f.ode_step, "RK4 step");
    cmd->add_option("--Omega", f.Omega, "sigma_x drive (case2)");
    cmd->add_option("--case", f.case_name, "case1 or case2");
    cmd->add_option("--omega-c", f.omega_c, "explicit cutoff list (overrides the sweep)");
    cmd->add_option("--sweep-min", f.sweep_min, "log-spaced sweep lower end");
    cmd->add_option("--sweep-max", f.sweep_max, "log-spaced sweep upper end");
    cmd->add_option("--sweep-points", f.sweep_points, "log-spaced sweep size");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--jobs", f.jobs, "parallel sweep workers");
    cmd->add_flag("--trajectory", f.trajectory, "also dump per-point trajectories");
}

std::string compose_config(const GroupFlags& f, const std::string& group, bool beta_set) {
    std::ostringstream os;
    os << "case = " << f.case_name << "\n";
    os << "s = " << num(f.s) << "\n";
    os << "alpha = " << num(f.alpha) << "\n";
    if (beta_set)
        os << "beta = " << num(f.beta) << "\n";
    else
        os << "T_bath = " << num(f.T_bath) << "\n";
    os << "epsilon = " << num(f.epsilon) << "\n";
    os << "t1 = " << num(f.t1) << "\n";
    os << "t2 = " << num(f.t2) << "\n";
    os << "horizon = " << num(f.horizon) << "\n";
    os << "grid_steps = " << f.grid_steps << "\n";
    os << "ode_step = " << num(f.ode_step) << "\n";
    os << "Omega = " << num(f.Omega) << "\n";
    os << "jobs = " << f.jobs << "\n";
    os << "out_dir = " << f.out_dir << "\n";
    os << "trajectory = " << (f.trajectory ? "true" : "false") << "\n";
    os << "outputs = " << group << "\n";
    if (!f.omega_c.empty()) {
        os << "omega_c = ";
        for (std::size_t i = 0; i < f.omega_c.size(); ++i)
            os << (i ? "," : "") << num(f.omega_c[i]);
        os << "\n";
    } else {
        os << "omega_c_min = " << num(f.sweep_min) << "\n";
        os << "omega_c_max = " << num(f.sweep_max) << "\n";
        os << "omega_c_points = " << f.sweep_points << "\n";
    }
    return os.str();
}

int run_config(kcv_config* cfg, const char* out_override, int jobs_override) {
    int n_errors = 0, exit_code = 0;
    const kcv_status st = kcv_run_experiment(cfg, out_override, jobs_override, &n_errors, &exit_code);
    kcv_config_free(cfg);
    if (st != KCV_OK) {
        std::cerr << "error (" << kcv_status_name(st) << "): " << kcv_last_error() << "\n";
        return status_to_exit(st);
    }
    if (n_errors > 0)
        std::cerr << n_errors << " sweep point error(s) recorded in errors.csv\n";
    return exit_code;
}

void print_summary(const std::string& out_dir) {
    std::ifstream is(out_dir + "/summary.csv");
    if (!is) return;
    std::cout << is.rdbuf();
}

void check_print(void*, int id, const char* name, int passed, const char* details,
                 double seconds) {
    std::printf("criterion %2d [%s] %s: %s (%.2f s)\n", id, passed ? "PASS" : "FAIL", name,
                details, seconds);
    std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kcviol: Kolmogorov-consistency violation toolkit for a dissipative qubit"};
    app.require_subcommand(1);

    // run --config
    auto* run = app.add_subcommand("run", "run an experiment described by a config file");
    std::string config_path, run_out;
    int run_jobs = 0;
    run->add_option("--config", config_path, "config file path")->required();
    run->add_option("--out", run_out, "output directory override");
    run->add_option("--jobs", run_jobs, "worker override");

    auto* check = app.add_subcommand("check", "run the verification suite");

    const std::vector<std::string> groups = {"rates", "viol", "nonmarkov", "thermo", "witnesses"};
    std::vector<GroupFlags> flags(groups.size());
    std::vector<CLI::App*> group_cmds;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto* cmd = app.add_subcommand(groups[i], "compute the '" + groups[i] + "' output group");
        add_group_flags(cmd, flags[i]);
        group_cmds.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        kcv_config* cfg = nullptr;
        const kcv_status st = kcv_config_parse_file(config_path.c_str(), &cfg);
        if (st != KCV_OK) {
            std::cerr << "config error: " << kcv_last_error() << "\n";
            return status_to_exit(st);
        }
        return run_config(cfg, run_out.empty() ? nullptr : run_out.c_str(), run_jobs);
    }

    if (check->parsed()) {
        int n_failed = 0;
        const kcv_status st = kcv_check_run(check_print, nullptr, &n_failed);
        if (st != KCV_OK) {
            std::cerr << "check aborted (" << kcv_status_name(st) << "): " << kcv_last_error()
                      << "\n";
            return status_to_exit(st);
        }
        std::printf("%s (%d criteria failed)\n", n_failed == 0 ? "ALL PASS" : "FAILURES", n_failed);
        return n_failed == 0 ? 0 : 1;
    }

    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (!group_cmds[i]->parsed()) continue;
        const bool beta_set = group_cmds[i]->count("--beta") > 0;
        const std::string text = compose_config(flags[i], groups[i], beta_set);
        kcv_config* cfg = nullptr;
        const kcv_status st = kcv_config_parse_string(text.c_str(), &cfg);
        if (st != KCV_OK) {
            std::cerr << "config error: " << kcv_last_error() << "\n";
            return status_to_exit(st);
        }
        const std::string out_dir = flags[i].out_dir;
        const int code = run_config(cfg, nullptr, 0);
        if (code == 0 || code == 3) print_summary(out_dir);
        return code;
    }
    return 0;
}

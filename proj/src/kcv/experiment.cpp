#include "kcv/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "kcv/csv.hpp"
#include "kcv/dynamics.hpp"
#include "kcv/error.hpp"
#include "kcv/kcc.hpp"
#include "kcv/nonmarkov.hpp"
#include "kcv/thermo.hpp"
#include "kcv/witnesses.hpp"

namespace kcv {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_argument: return "invalid_argument";
        case errc::domain: return "domain";
        case errc::range: return "range";
        case errc::numeric: return "numeric";
        case errc::positivity: return "positivity";
        case errc::conditioning: return "conditioning";
        case errc::invariant: return "invariant";
        case errc::parse: return "parse";
        case errc::io: return "io";
    }
    return "?";
}

struct RatesScalars {
    double G_T{kNan}, M_T{kNan}, N_T{kNan}, M_plus_N{kNan}, A_plus_T{kNan};
};
struct ViolRow {
    double viol{kNan}, S_factor{kNan}, M_t2{kNan}, N_t2{kNan}, bound{kNan};
};
struct NonmarkovRow {
    double N_rhp{kNan}, N1{kNan}, N2{kNan}, N_blp{kNan}, viol{kNan}, lower{kNan}, upper{kNan};
};
struct ThermoScalars {
    double S_vn{kNan}, I_sr{kNan}, F_x{kNan}, Q{kNan}, sigma{kNan}, sigma_approx{kNan};
};
struct WitnessRow {
    double C01{kNan}, C12{kNan}, C02{kNan}, K3{kNan}, viol{kNan}, residual{kNan},
        max_interference{kNan};
};

struct PointResult {
    double omega_c{0.0};
    std::optional<RatesScalars> rates;
    std::string rates_csv;
    std::optional<ViolRow> viol;
    std::optional<NonmarkovRow> nonmarkov;
    std::optional<ThermoScalars> thermo;
    std::string thermo_csv;
    std::optional<WitnessRow> witnesses;
    std::string trajectory_csv;
    std::vector<SweepError> errors;
};

bool wants(const ExperimentConfig& cfg, OutputGroup g) {
    for (OutputGroup o : cfg.outputs)
        if (o == g) return true;
    return false;
}

QubitState initial_state(const ExperimentConfig& cfg) {
    if (cfg.kind == CaseKind::case1) return QubitState{0.5, cplx(0.5, 0.0)};
    return QubitState{1.0, cplx(0.0, 0.0)};
}

Hamiltonian hamiltonian(const ExperimentConfig& cfg) {
    return Hamiltonian{1.0, cfg.kind == CaseKind::case2 ? cfg.Omega : 0.0};
}

void compute_thermo(const ExperimentConfig& cfg, const RateProfile& prof, PointResult& out) {
    std::ostringstream os;
    CsvWriter w(os);
    w.header("t,S_vn,I_sr,F_x,Q,sigma,sigma_approx");
    QubitState s = initial_state(cfg);
    ThermoScalars at_t2;
    bool have_t2 = false;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        if (i > 0) s = propagate_closed_form(s, prof.t[i - 1], prof.t[i], prof, 1.0);
        s.validate(1e-8); // invalid states abort the group for this point
        const double tt = prof.t[i];
        const double lam = prof.lambda[i];
        const double Gam = prof.Gamma[i];
        const double adot = Gam - lam * s.a;
        const double S_vn = von_neumann_entropy(s);
        const double I_sr = mutual_information(s);
        const double F_x = fano_factor(s);
        const double Q = 1.0 * (s.a - 0.5);
        const double z = s.a - 0.5;
        const double r_half = std::sqrt(z * z + std::norm(s.c));
        double sigma = kNan;
        if (r_half < 0.5 - 1e-12)
            sigma = entropy_production_state(s, Gam, lam, cfg.bath.beta, 1.0).sigma;
        // viol^2/S^2 = |c(t)|^2 for any admissible (t1, t) pair, so the
        // weak-coherence form is time-local
        const double sigma_apx = 2.0 * lam * std::norm(s.c) - cfg.bath.beta * 1.0 * adot;
        w.col(tt).col(S_vn).col(I_sr).col(F_x).col(Q).col(sigma).col(sigma_apx);
        w.endrow();
        if (!have_t2 && tt >= cfg.t2 - 1e-12) {
            at_t2 = ThermoScalars{S_vn, I_sr, F_x, Q, sigma, sigma_apx};
            have_t2 = true;
        }
    }
    // dual-route heat check at t2 (formula vs propagated state)
    at_t2.Q = heat(cfg.t2, prof, 1.0);
    out.thermo = at_t2;
    out.thermo_csv = os.str();
}

PointResult compute_point(const ExperimentConfig& cfg, std::size_t index) {
    PointResult out;
    out.omega_c = cfg.omega_c_sweep[index];

    auto record = [&](const char* group, const error& e) {
        out.errors.push_back(SweepError{index, out.omega_c, group, errc_name(e.code()), e.what()});
    };
    auto record_generic = [&](const char* group, const std::exception& e) {
        out.errors.push_back(SweepError{index, out.omega_c, group, "internal", e.what()});
    };

    BathParams bp = cfg.bath;
    bp.omega_c = out.omega_c;
    RateProfile prof;
    try {
        prof = build_rate_profile(bp, cfg.horizon, cfg.grid_steps);
    } catch (const error& e) {
        record("profile", e);
        return out; // nothing else is computable without rates
    } catch (const std::exception& e) {
        record_generic("profile", e);
        return out;
    }

    if (wants(cfg, OutputGroup::rates)) {
        RatesScalars rs;
        rs.G_T = prof.G.back();
        rs.M_T = prof.M.back();
        rs.N_T = prof.N.back();
        rs.M_plus_N = rs.M_T + rs.N_T;
        rs.A_plus_T = prof.A_plus.back();
        out.rates = rs;
        std::ostringstream os;
        prof.write_csv(os);
        out.rates_csv = os.str();
    }

    const PropagationOptions opts{cfg.ode_step, PositivityMode::permissive};

    if (wants(cfg, OutputGroup::viol)) {
        try {
            ViolRow row;
            row.S_factor = sine_factor(cfg.t1, cfg.t2, 1.0);
            row.M_t2 = prof.M_at(cfg.t2);
            row.N_t2 = prof.N_at(cfg.t2);
            row.bound = viol_upper_bound(prof, cfg.t2);
            if (cfg.kind == CaseKind::case1) {
                row.viol = kcc_violation_closed_form(cfg.t1, cfg.t2, prof, 1.0).viol;
            } else {
                row.viol = kcc_violation(initial_state(cfg), MeasurementBasis::pointer(), cfg.t1,
                                         cfg.t2, prof, hamiltonian(cfg), opts)
                               .viol;
            }
            out.viol = row;
        } catch (const error& e) {
            record("viol", e);
        } catch (const std::exception& e) {
            record_generic("viol", e);
        }
    }

    if (wants(cfg, OutputGroup::nonmarkov)) {
        try {
            const BlpReport rep = blp_viol_sandwich(cfg.t1, cfg.t2, prof, 1.0);
            out.nonmarkov = NonmarkovRow{rhp_measure(prof, cfg.t2), rep.N1_tilde, rep.N2_tilde,
                                         rep.N_blp,                 rep.viol,     rep.lower,
                                         rep.upper};
        } catch (const error& e) {
            record("nonmarkov", e);
        } catch (const std::exception& e) {
            record_generic("nonmarkov", e);
        }
    }

    if (wants(cfg, OutputGroup::thermo)) {
        try {
            compute_thermo(cfg, prof, out);
        } catch (const error& e) {
            out.thermo.reset();
            out.thermo_csv.clear();
            record("thermo", e);
        } catch (const std::exception& e) {
            out.thermo.reset();
            out.thermo_csv.clear();
            record_generic("thermo", e);
        }
    }

    if (wants(cfg, OutputGroup::witnesses)) {
        try {
            const LgiReport lgi = lgi_correlators(cfg.t1, cfg.t2, prof, 1.0);
            const KdTable kd = kd_distribution(cfg.t1, cfg.t2, MeasurementBasis::x_basis(),
                                               initial_state(cfg), prof, hamiltonian(cfg), opts);
            out.witnesses =
                WitnessRow{lgi.C_01, lgi.C_12,
                           lgi.C_02, lgi.K3,
                           lgi.viol, lgi.decomposition_residual,
                           kd.max_abs_interference()};
        } catch (const error& e) {
            record("witnesses", e);
        } catch (const std::exception& e) {
            record_generic("witnesses", e);
        }
    }

    if (cfg.trajectory) {
        try {
            std::ostringstream os;
            write_trajectory_csv(os, initial_state(cfg), hamiltonian(cfg), prof, opts);
            out.trajectory_csv = os.str();
        } catch (const error& e) {
            record("trajectory", e);
        } catch (const std::exception& e) {
            record_generic("trajectory", e);
        }
    }
    return out;
}

std::string point_file(const char* stem, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem, index);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(errc::io, "cannot open " + path.string() + " for writing");
    os << content;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.out_dir = cfg.out_dir;

    const std::size_t n = cfg.omega_c_sweep.size();
    std::vector<PointResult> points(n);
    const int jobs = std::min<int>(cfg.jobs, static_cast<int>(n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) points[i] = compute_point(cfg, i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                points[i] = compute_point(cfg, i);
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::error_code fs_ec;
    std::filesystem::create_directories(cfg.out_dir, fs_ec);
    if (fs_ec) fail(errc::io, "cannot create output directory " + cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);

    // summary.csv
    {
        std::ostringstream os;
        CsvWriter w(os);
        std::string header = "omega_c";
        if (wants(cfg, OutputGroup::rates)) header += ",G_T,M_T,N_T,M_plus_N,A_plus_T";
        if (wants(cfg, OutputGroup::viol)) header += ",viol,S_factor,M_t2,N_t2,bound";
        if (wants(cfg, OutputGroup::nonmarkov))
            header += ",N_rhp,N1_tilde,N2_tilde,N_blp,blp_lower,blp_upper";
        if (wants(cfg, OutputGroup::thermo))
            header += ",S_vn_t2,I_sr_t2,F_x_t2,Q_t2,sigma_t2,sigma_approx_t2";
        if (wants(cfg, OutputGroup::witnesses))
            header += ",C01,C12,C02,K3,kd_viol,k3_residual,max_abs_interference";
        w.header(header);
        for (const PointResult& p : points) {
            w.col(p.omega_c);
            if (wants(cfg, OutputGroup::rates)) {
                const RatesScalars rs = p.rates.value_or(RatesScalars{});
                w.col(rs.G_T).col(rs.M_T).col(rs.N_T).col(rs.M_plus_N).col(rs.A_plus_T);
            }
            if (wants(cfg, OutputGroup::viol)) {
                const ViolRow r = p.viol.value_or(ViolRow{});
                w.col(r.viol).col(r.S_factor).col(r.M_t2).col(r.N_t2).col(r.bound);
            }
            if (wants(cfg, OutputGroup::nonmarkov)) {
                const NonmarkovRow r = p.nonmarkov.value_or(NonmarkovRow{});
                w.col(r.N_rhp).col(r.N1).col(r.N2).col(r.N_blp).col(r.lower).col(r.upper);
            }
            if (wants(cfg, OutputGroup::thermo)) {
                const ThermoScalars r = p.thermo.value_or(ThermoScalars{});
                w.col(r.S_vn).col(r.I_sr).col(r.F_x).col(r.Q).col(r.sigma).col(r.sigma_approx);
            }
            if (wants(cfg, OutputGroup::witnesses)) {
                const WitnessRow r = p.witnesses.value_or(WitnessRow{});
                w.col(r.C01).col(r.C12).col(r.C02).col(r.K3).col(r.viol).col(r.residual).col(
                    r.max_interference);
            }
            w.endrow();
        }
        write_file(dir / "summary.csv", os.str());
    }

    // per-group sweep CSVs with the module-pinned headers
    if (wants(cfg, OutputGroup::viol)) {
        std::ostringstream os;
        CsvWriter w(os);
        w.header("omega_c,t1,t2,viol,S_factor,M,N,bound");
        for (const PointResult& p : points) {
            if (!p.viol) continue;
            w.col(p.omega_c).col(cfg.t1).col(cfg.t2).col(p.viol->viol).col(p.viol->S_factor);
            w.col(p.viol->M_t2).col(p.viol->N_t2).col(p.viol->bound);
            w.endrow();
        }
        write_file(dir / "viol.csv", os.str());
    }
    if (wants(cfg, OutputGroup::nonmarkov)) {
        std::ostringstream os;
        CsvWriter w(os);
        w.header("omega_c,N_rhp,N1_tilde,N2_tilde,N_blp,viol,lower,upper");
        for (const PointResult& p : points) {
            if (!p.nonmarkov) continue;
            const NonmarkovRow& r = *p.nonmarkov;
            w.col(p.omega_c).col(r.N_rhp).col(r.N1).col(r.N2).col(r.N_blp).col(r.viol);
            w.col(r.lower).col(r.upper);
            w.endrow();
        }
        write_file(dir / "nonmarkov.csv", os.str());
    }
    if (wants(cfg, OutputGroup::witnesses)) {
        std::ostringstream os;
        CsvWriter w(os);
        w.header("omega_c,t1,t2,C01,C12,C02,K3,viol,residual,max_abs_interference");
        for (const PointResult& p : points) {
            if (!p.witnesses) continue;
            const WitnessRow& r = *p.witnesses;
            w.col(p.omega_c).col(cfg.t1).col(cfg.t2).col(r.C01).col(r.C12).col(r.C02).col(r.K3);
            w.col(r.viol).col(r.residual).col(r.max_interference);
            w.endrow();
        }
        write_file(dir / "witnesses.csv", os.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (wants(cfg, OutputGroup::rates) && !points[i].rates_csv.empty())
            write_file(dir / point_file("rates", i), points[i].rates_csv);
        if (wants(cfg, OutputGroup::thermo) && !points[i].thermo_csv.empty())
            write_file(dir / point_file("thermo", i), points[i].thermo_csv);
        if (cfg.trajectory && !points[i].trajectory_csv.empty())
            write_file(dir / point_file("trajectory", i), points[i].trajectory_csv);
    }

    // errors.csv (always written; header-only when clean)
    {
        std::ostringstream os;
        os << "omega_c,group,code,message\n";
        for (const PointResult& p : points)
            for (const SweepError& e : p.errors) {
                std::string msg = e.message;
                for (char& ch : msg)
                    if (ch == ',' || ch == '\n') ch = ';';
                os << format_double(e.omega_c) << ',' << e.group << ',' << e.code << ',' << msg
                   << '\n';
                result.errors.push_back(e);
            }
        write_file(dir / "errors.csv", os.str());
    }

    for (const SweepError& e : result.errors) {
        if (e.code == "invariant") {
            result.exit_code = 1;
            break;
        }
        result.exit_code = 3;
    }
    return result;
}

} // namespace kcv

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kcv/config.hpp"
#include "kcv/experiment.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("kcviol_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::vector<double>> rows_of(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line); // header
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    return rows;
}

kcv::ExperimentConfig small_config() {
    kcv::ExperimentConfig cfg = kcv::ExperimentConfig::defaults();
    cfg.omega_c_sweep = {0.8, 2.0, 5.0};
    cfg.grid_steps = 600;
    cfg.horizon = 12.0;
    cfg.t1 = 5.0;
    cfg.t2 = 10.0;
    return cfg;
}

} // namespace

TEST_CASE("runs are deterministic and job-count independent") {
    kcv::ExperimentConfig cfg = small_config();
    cfg.outputs = {kcv::OutputGroup::rates, kcv::OutputGroup::viol, kcv::OutputGroup::nonmarkov};

    const fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2"), d3 = fresh_dir("det3");
    cfg.out_dir = d1.string();
    cfg.jobs = 1;
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);
    cfg.out_dir = d2.string();
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);
    cfg.out_dir = d3.string();
    cfg.jobs = 3;
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);

    for (const char* f : {"summary.csv", "viol.csv", "nonmarkov.csv", "rates_0000.csv",
                          "rates_0002.csv", "errors.csv"}) {
        CHECK(slurp(d1 / f) == slurp(d2 / f));
        CHECK(slurp(d1 / f) == slurp(d3 / f));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("headers and full-precision values round trip") {
    kcv::ExperimentConfig cfg = small_config();
    cfg.outputs = {kcv::OutputGroup::viol};
    const fs::path dir = fresh_dir("fmt");
    cfg.out_dir = dir.string();
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);

    const std::string viol_csv = slurp(dir / "viol.csv");
    CHECK(viol_csv.rfind("omega_c,t1,t2,viol,S_factor,M,N,bound\n", 0) == 0);
    const auto rows = rows_of(viol_csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == 2.0); // omega_c round-trips exactly
    CHECK(rows[0][1] == 5.0);
    CHECK(rows[0][2] == 10.0);
    for (const auto& row : rows) {
        CHECK(row[3] > 0.0);
        CHECK(row[3] <= row[7] + 1e-12); // viol <= bound
    }

    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind("omega_c,viol,S_factor,M_t2,N_t2,bound\n", 0) == 0);
    CHECK(slurp(dir / "errors.csv") == "omega_c,group,code,message\n");
    fs::remove_all(dir);
}

TEST_CASE("thermo on an unphysical-population bath records errors per point") {
    // default temperature reading drives case I populations far outside
    // [0, 1]; the thermo group must fail per point without corrupting the
    // rest of the sweep
    kcv::ExperimentConfig cfg = small_config();
    cfg.horizon = 30.0;
    cfg.t1 = 15.0;
    cfg.t2 = 30.0;
    cfg.grid_steps = 1500;
    cfg.outputs = {kcv::OutputGroup::rates, kcv::OutputGroup::thermo};
    const fs::path dir = fresh_dir("errs");
    cfg.out_dir = dir.string();
    const kcv::ExperimentResult res = kcv::run_experiment(cfg);
    CHECK(res.exit_code == 3);
    CHECK(res.errors.size() == 3); // one thermo failure per sweep point
    for (const kcv::SweepError& e : res.errors) CHECK(e.group == "thermo");
    // rates files survived untouched
    for (const char* f : {"rates_0000.csv", "rates_0001.csv", "rates_0002.csv"})
        CHECK(fs::exists(dir / f));
    CHECK(!fs::exists(dir / "thermo_0000.csv"));
    const auto err_rows = slurp(dir / "errors.csv");
    CHECK(err_rows.find("thermo,domain") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("thermo columns on a physical bath") {
    kcv::ExperimentConfig cfg = small_config();
    cfg.bath.beta = 300.0; // low temperature keeps populations physical
    cfg.omega_c_sweep = {2.0};
    cfg.outputs = {kcv::OutputGroup::thermo};
    const fs::path dir = fresh_dir("thermo");
    cfg.out_dir = dir.string();
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);
    const std::string csv = slurp(dir / "thermo_0000.csv");
    CHECK(csv.rfind("t,S_vn,I_sr,F_x,Q,sigma,sigma_approx\n", 0) == 0);
    const auto rows = rows_of(csv);
    REQUIRE(rows.size() == 601);
    for (std::size_t i = 10; i < rows.size(); i += 50) {
        CHECK(rows[i][1] >= 0.0);             // entropy
        CHECK(rows[i][1] <= std::log(2.0) + 1e-12);
        CHECK(rows[i][2] == rows[i][1]);      // I_sr equals S for a pure start
        CHECK(rows[i][3] >= -1e-12);          // Fano in [0,1]
        CHECK(rows[i][3] <= 1.0 + 1e-12);
    }
    fs::remove_all(dir);
}

TEST_CASE("case 2 sweep emits the violation trend data") {
    kcv::ExperimentConfig cfg = small_config();
    cfg.kind = kcv::CaseKind::case2;
    cfg.outputs = {kcv::OutputGroup::viol};
    cfg.ode_step = 2e-3;
    const fs::path dir = fresh_dir("case2");
    cfg.out_dir = dir.string();
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);
    const auto rows = rows_of(slurp(dir / "viol.csv"));
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(std::isfinite(row[3]));
        CHECK(row[3] >= 0.0);
    }
    fs::remove_all(dir);
}

TEST_CASE("trajectory dump on request") {
    kcv::ExperimentConfig cfg = small_config();
    cfg.omega_c_sweep = {2.0};
    cfg.trajectory = true;
    cfg.outputs = {kcv::OutputGroup::viol};
    const fs::path dir = fresh_dir("traj");
    cfg.out_dir = dir.string();
    REQUIRE(kcv::run_experiment(cfg).exit_code == 0);
    const std::string csv = slurp(dir / "trajectory_0000.csv");
    CHECK(csv.rfind("t,a,re_c,im_c,r\n", 0) == 0);
    CHECK(rows_of(csv).size() == 601);
    fs::remove_all(dir);
}

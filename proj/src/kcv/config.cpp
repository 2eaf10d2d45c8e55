#include "kcv/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kcv/error.hpp"

namespace kcv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        fail(errc::parse, "key '" + key + "': expected a number, got '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double x = parse_number(key, value);
    if (x != std::floor(x)) fail(errc::parse, "key '" + key + "': expected an integer");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(errc::parse, "key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// sweep geometry keys are combined at validation time
struct SweepSpec {
    double lo{0.5}, hi{10.0};
    int points{20};
};

} // namespace

const char* output_group_name(OutputGroup g) {
    switch (g) {
        case OutputGroup::rates: return "rates";
        case OutputGroup::viol: return "viol";
        case OutputGroup::nonmarkov: return "nonmarkov";
        case OutputGroup::thermo: return "thermo";
        case OutputGroup::witnesses: return "witnesses";
    }
    return "?";
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) {
        const double w = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[static_cast<std::size_t>(i)] = std::exp(llo + w * (lhi - llo));
    }
    return out;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.omega_c_sweep = log_spaced(0.5, 10.0, 20);
    return cfg;
}

void ExperimentConfig::validate() const {
    try {
        bath.validate();
    } catch (const error& e) {
        fail(errc::parse, e.what());
    }
    if (!(t1 >= 0.0 && t1 <= t2 && t2 <= horizon))
        fail(errc::parse, "keys 't1'/'t2'/'horizon': need 0 <= t1 <= t2 <= horizon");
    if (grid_steps < 2) fail(errc::parse, "key 'grid_steps': need at least 2");
    if (!(ode_step > 0.0)) fail(errc::parse, "key 'ode_step': must be positive");
    if (jobs < 1) fail(errc::parse, "key 'jobs': must be >= 1");
    if (omega_c_sweep.empty()) fail(errc::parse, "key 'omega_c': sweep must be non-empty");
    for (std::size_t i = 0; i < omega_c_sweep.size(); ++i) {
        if (!(omega_c_sweep[i] > 0.0))
            fail(errc::parse, "key 'omega_c': sweep values must be positive");
        if (i > 0 && omega_c_sweep[i] < omega_c_sweep[i - 1])
            fail(errc::parse, "key 'omega_c': sweep values must be sorted ascending");
    }
    if (outputs.empty()) fail(errc::parse, "key 'outputs': must request at least one group");
    if (kind == CaseKind::case2) {
        for (OutputGroup g : outputs)
            if (g == OutputGroup::thermo || g == OutputGroup::witnesses)
                fail(errc::parse, std::string("key 'outputs': group '") + output_group_name(g) +
                                      "' uses case1 closed forms and is unavailable for case2");
    }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "case") {
        if (value == "case1") cfg.kind = CaseKind::case1;
        else if (value == "case2") cfg.kind = CaseKind::case2;
        else fail(errc::parse, "key 'case': expected case1 or case2, got '" + value + "'");
    } else if (key == "s") {
        cfg.bath.s = parse_number(key, value);
    } else if (key == "alpha") {
        cfg.bath.alpha = parse_number(key, value);
    } else if (key == "epsilon") {
        cfg.bath.epsilon = parse_number(key, value);
    } else if (key == "T_bath") {
        const double T = parse_number(key, value);
        if (!(T > 0.0)) fail(errc::parse, "key 'T_bath': must be positive");
        cfg.bath.beta = 1.0 / T;
    } else if (key == "beta") {
        cfg.bath.beta = parse_number(key, value);
    } else if (key == "Omega") {
        cfg.Omega = parse_number(key, value);
    } else if (key == "t1") {
        cfg.t1 = parse_number(key, value);
    } else if (key == "t2") {
        cfg.t2 = parse_number(key, value);
    } else if (key == "horizon") {
        cfg.horizon = parse_number(key, value);
    } else if (key == "grid_steps") {
        cfg.grid_steps = parse_int(key, value);
    } else if (key == "ode_step") {
        cfg.ode_step = parse_number(key, value);
    } else if (key == "jobs") {
        cfg.jobs = parse_int(key, value);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "trajectory") {
        cfg.trajectory = parse_bool(key, value);
    } else if (key == "omega_c") {
        cfg.omega_c_sweep.clear();
        for (const std::string& item : split_list(value))
            cfg.omega_c_sweep.push_back(parse_number(key, item));
        if (cfg.omega_c_sweep.empty()) fail(errc::parse, "key 'omega_c': empty list");
    } else if (key == "omega_c_min" || key == "omega_c_max" || key == "omega_c_points") {
        // handled by parse_config which sees all three together
        fail(errc::parse, "key '" + key + "': only valid inside a config document");
    } else if (key == "outputs") {
        cfg.outputs.clear();
        for (const std::string& item : split_list(value)) {
            if (item == "rates") cfg.outputs.push_back(OutputGroup::rates);
            else if (item == "viol") cfg.outputs.push_back(OutputGroup::viol);
            else if (item == "nonmarkov") cfg.outputs.push_back(OutputGroup::nonmarkov);
            else if (item == "thermo") cfg.outputs.push_back(OutputGroup::thermo);
            else if (item == "witnesses") cfg.outputs.push_back(OutputGroup::witnesses);
            else fail(errc::parse, "key 'outputs': unknown group '" + item + "'");
        }
    } else {
        fail(errc::parse, "unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg = ExperimentConfig::defaults();

    bool sweep_geom_seen = false, sweep_list_seen = false, beta_seen = false, tbath_seen = false;
    double geom_lo = 0.5, geom_hi = 10.0;
    int geom_points = 20;

    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(errc::parse, "line " + std::to_string(line_no) + ": malformed section header");
            const std::string section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "bath" && section != "sweep" &&
                section != "case2")
                fail(errc::parse,
                     "line " + std::to_string(line_no) + ": unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(errc::parse, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "omega_c_min") {
                geom_lo = parse_number(key, value);
                sweep_geom_seen = true;
            } else if (key == "omega_c_max") {
                geom_hi = parse_number(key, value);
                sweep_geom_seen = true;
            } else if (key == "omega_c_points") {
                geom_points = parse_int(key, value);
                sweep_geom_seen = true;
            } else {
                if (key == "omega_c") sweep_list_seen = true;
                if (key == "beta") beta_seen = true;
                if (key == "T_bath") tbath_seen = true;
                apply_setting(cfg, key, value);
            }
        } catch (const error& e) {
            fail(errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (beta_seen && tbath_seen) fail(errc::parse, "keys 'beta' and 'T_bath' are exclusive");
    if (sweep_geom_seen && sweep_list_seen)
        fail(errc::parse, "keys 'omega_c' and 'omega_c_min/max/points' are exclusive");
    if (sweep_geom_seen) {
        if (!(geom_lo > 0.0 && geom_hi >= geom_lo && geom_points >= 1))
            fail(errc::parse, "keys 'omega_c_min/max/points': need 0 < min <= max, points >= 1");
        cfg.omega_c_sweep = log_spaced(geom_lo, geom_hi, geom_points);
    }
    cfg.validate();
    return cfg;
}

} // namespace kcv

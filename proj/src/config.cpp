#include "heatctl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heatctl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(line_number) +
                                         ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            ini.sections_[section];
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(line_number) +
                                     ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(line_number) + ": empty key");
        ini.sections_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string IniFile::get_string(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw std::runtime_error(origin_ + ": missing required key [" + section + "] " + key);
    return it->second.at(key);
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    return has(section, key) ? sections_.at(section).at(key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0')
        throw std::runtime_error(origin_ + ": [" + section + "] " + key + ": not a number: '" +
                                 raw + "'");
    return v;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long IniFile::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const double v = get_double(section, key);
    const long r = static_cast<long>(v);
    if (static_cast<double>(r) != v)
        throw std::runtime_error(origin_ + ": [" + section + "] " + key + ": expected an integer");
    return r;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key);
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    throw std::runtime_error(origin_ + ": [" + section + "] " + key + ": expected a boolean");
}

std::vector<double> IniFile::get_list(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    std::vector<double> out;
    std::string item;
    std::istringstream ss(raw);
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0')
            throw std::runtime_error(origin_ + ": [" + section + "] " + key +
                                     ": not a number in list: '" + t + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw std::runtime_error(origin_ + ": [" + section + "] " + key + ": empty list");
    return out;
}

std::vector<double> IniFile::get_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const {
    return has(section, key) ? get_list(section, key) : fallback;
}

namespace {

ThermalParams thermal_from(const IniFile& ini, const std::string& section,
                           const ThermalParams& fallback) {
    ThermalParams p = fallback;
    p.r_out = ini.get_double(section, "r_out", fallback.r_out);
    p.r_m = ini.get_double(section, "r_m", fallback.r_m);
    p.c = ini.get_double(section, "c", fallback.c);
    p.t_m = ini.get_double(section, "t_m", fallback.t_m);
    p.validate();
    return p;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    const IniFile ini = IniFile::parse_file(path);
    RunConfig cfg;

    cfg.weather_csv = ini.get_string("paths", "weather_csv", "");
    cfg.training_csv = ini.get_string("paths", "training_csv", "");
    cfg.output_dir = ini.get_string("paths", "output_dir", "out");

    cfg.identify_thermal = ini.get_bool("thermal", "identify", false);
    if (!cfg.identify_thermal) cfg.thermal = thermal_from(ini, "thermal", cfg.thermal);
    cfg.truth = thermal_from(ini, "truth", cfg.identify_thermal ? cfg.truth : cfg.thermal);

    cfg.truth_profile.base_kw = ini.get_double("truth", "q_e_base_kw", 0.5);
    cfg.truth_profile.solar_kw_per_100wm2 = ini.get_double("truth", "q_e_solar_per_100wm2", 0.2);
    if (ini.has("truth", "q_e_hourly_extra")) {
        cfg.truth_profile.hourly_extra = ini.get_list("truth", "q_e_hourly_extra");
        if (cfg.truth_profile.hourly_extra.size() != 24)
            throw std::runtime_error(path + ": [truth] q_e_hourly_extra must have 24 values");
    }

    cfg.plant.p_bar = ini.get_double("plant", "p_bar", cfg.plant.p_bar);
    cfg.plant.p_r_bar = ini.get_double("plant", "p_r_bar", cfg.plant.p_r_bar);
    cfg.plant.stages = ini.get_list("plant", "stages", cfg.plant.stages);
    cfg.plant.cop_c0 = ini.get_double("plant", "cop_c0", cfg.plant.cop_c0);
    cfg.plant.cop_c1 = ini.get_double("plant", "cop_c1", cfg.plant.cop_c1);
    cfg.plant.cop_c2 = ini.get_double("plant", "cop_c2", cfg.plant.cop_c2);
    cfg.plant.cop_floor = ini.get_double("plant", "cop_floor", cfg.plant.cop_floor);
    cfg.plant.cop_t_min = ini.get_double("plant", "cop_t_min", cfg.plant.cop_t_min);
    cfg.plant.cop_t_max = ini.get_double("plant", "cop_t_max", cfg.plant.cop_t_max);
    cfg.plant.kp_scale = ini.get_double("plant", "kp_scale", cfg.plant.kp_scale);
    cfg.plant.ki_per_hour = ini.get_double("plant", "ki_per_hour", cfg.plant.ki_per_hour);
    cfg.plant.stage_up_error = ini.get_double("plant", "stage_up_error", cfg.plant.stage_up_error);
    cfg.plant.stage_dwell = ini.get_double("plant", "stage_dwell", cfg.plant.stage_dwell);
    cfg.plant.min_on_time = ini.get_double("plant", "min_on_time", cfg.plant.min_on_time);
    cfg.plant.min_off_time = ini.get_double("plant", "min_off_time", cfg.plant.min_off_time);
    cfg.plant.validate();

    cfg.defrost_enabled = ini.get_bool("defrost", "enabled", true);
    cfg.defrost.trigger_temp_max =
        ini.get_double("defrost", "trigger_temp_max", cfg.defrost.trigger_temp_max);
    cfg.defrost.rh_min = ini.get_double("defrost", "rh_min", cfg.defrost.rh_min);
    cfg.defrost.rh_max = ini.get_double("defrost", "rh_max", cfg.defrost.rh_max);
    cfg.defrost.events_per_day =
        ini.get_double("defrost", "events_per_day", cfg.defrost.events_per_day);
    cfg.defrost.event_duration =
        ini.get_double("defrost", "event_duration", cfg.defrost.event_duration);
    cfg.defrost.element_stage = static_cast<std::size_t>(
        ini.get_int("defrost", "element_stage", static_cast<long>(cfg.defrost.element_stage)));
    cfg.defrost.validate();

    cfg.mpc.horizon = static_cast<int>(ini.get_int("mpc", "horizon", cfg.mpc.horizon));
    cfg.mpc.dt = ini.get_double("mpc", "dt", cfg.mpc.dt);
    cfg.mpc.comfort_band = ini.get_double("mpc", "comfort_band", cfg.mpc.comfort_band);
    cfg.mpc.price_demand = ini.get_double("mpc", "price_demand", cfg.mpc.price_demand);
    cfg.mpc.price_energy_by_hour =
        ini.get_list("mpc", "price_energy", cfg.mpc.price_energy_by_hour);
    cfg.mpc.price_emission = ini.get_double("mpc", "price_emission", 0.0);
    if (ini.has("mpc", "emission_intensity"))
        cfg.mpc.emission_intensity_by_hour = ini.get_list("mpc", "emission_intensity");
    if (ini.has("mpc", "tracking_tau")) cfg.mpc.tracking_tau = ini.get_double("mpc", "tracking_tau");
    if (ini.has("mpc", "setpoint_rate_limit")) {
        const double v = ini.get_double("mpc", "setpoint_rate_limit");
        if (v > 0.0)
            cfg.mpc.setpoint_rate_limit = v;
        else
            cfg.mpc.setpoint_rate_limit.reset();
    }
    cfg.mpc.reference.day_ref = ini.get_double("mpc", "t_ref_day", cfg.mpc.reference.day_ref);
    cfg.mpc.reference.night_ref =
        ini.get_double("mpc", "t_ref_night", cfg.mpc.reference.night_ref);
    cfg.mpc.reference.day_start =
        static_cast<int>(ini.get_int("mpc", "ref_day_start", cfg.mpc.reference.day_start));
    cfg.mpc.reference.day_end =
        static_cast<int>(ini.get_int("mpc", "ref_day_end", cfg.mpc.reference.day_end));

    TuningState& tuning = cfg.mpc.tuning;
    tuning.sweep_grid = ini.get_list("tuning", "sweep_grid", default_sweep_grid());
    tuning.day_multiplier = ini.get_double("tuning", "day_multiplier", tuning.day_multiplier);
    tuning.night_multiplier =
        ini.get_double("tuning", "night_multiplier", tuning.night_multiplier);
    tuning.ppd_ceiling_pct = ini.get_double("tuning", "ppd_ceiling", tuning.ppd_ceiling_pct);
    tuning.day_start_hour =
        static_cast<int>(ini.get_int("tuning", "day_start_hour", tuning.day_start_hour));
    tuning.day_end_hour =
        static_cast<int>(ini.get_int("tuning", "day_end_hour", tuning.day_end_hour));
    tuning.period_h = ini.get_double("tuning", "period_h", tuning.period_h);
    tuning.pi_t_base = ini.get_double("tuning", "initial_pi_t", tuning.pi_t_base);

    ComfortContext& comfort = cfg.mpc.comfort;
    comfort.rel_humidity_pct = ini.get_double("comfort", "rh", comfort.rel_humidity_pct);
    comfort.air_speed_ms = ini.get_double("comfort", "air_speed", comfort.air_speed_ms);
    comfort.met = ini.get_double("comfort", "met", comfort.met);
    comfort.clo = ini.get_double("comfort", "clo", comfort.clo);

    const std::string kind = ini.get_string("benchmark", "policy", "constant");
    if (kind == "constant")
        cfg.benchmark_policy.kind = PolicyKind::kConstant;
    else if (kind == "schedule")
        cfg.benchmark_policy.kind = PolicyKind::kSchedule;
    else
        throw std::runtime_error(path + ": [benchmark] policy must be constant or schedule");
    cfg.benchmark_policy.constant_setpoint =
        ini.get_double("benchmark", "constant_setpoint", cfg.benchmark_policy.constant_setpoint);
    cfg.benchmark_policy.day_setpoint =
        ini.get_double("benchmark", "day_setpoint", cfg.benchmark_policy.day_setpoint);
    cfg.benchmark_policy.night_setpoint =
        ini.get_double("benchmark", "night_setpoint", cfg.benchmark_policy.night_setpoint);
    cfg.benchmark_policy.day_start_hour = static_cast<int>(
        ini.get_int("benchmark", "day_start_hour", cfg.benchmark_policy.day_start_hour));
    cfg.benchmark_policy.night_start_hour = static_cast<int>(
        ini.get_int("benchmark", "night_start_hour", cfg.benchmark_policy.night_start_hour));

    cfg.forecast_error.sigma_t_out = ini.get_double("forecast_error", "sigma_t_out", 0.0);
    cfg.forecast_error.sigma_ghi = ini.get_double("forecast_error", "sigma_ghi", 0.0);
    cfg.forecast_error.sigma_wind = ini.get_double("forecast_error", "sigma_wind", 0.0);

    const std::string sim_policy = ini.get_string("scenario", "policy", "mpc");
    if (sim_policy == "mpc")
        cfg.scenario_policy = PolicyKind::kMpc;
    else if (sim_policy == "constant")
        cfg.scenario_policy = PolicyKind::kConstant;
    else if (sim_policy == "schedule")
        cfg.scenario_policy = PolicyKind::kSchedule;
    else
        throw std::runtime_error(path + ": [scenario] policy must be mpc, constant, or schedule");
    if (ini.has("scenario", "start"))
        cfg.scenario_start = parse_iso8601(ini.get_string("scenario", "start"));
    cfg.scenario_days = ini.get_double("scenario", "days", cfg.scenario_days);
    cfg.internal_dt = ini.get_double("scenario", "internal_dt", cfg.internal_dt);
    cfg.initial_t_in = ini.get_double("scenario", "initial_t_in", cfg.initial_t_in);

    cfg.ident.steady.max_temp_drift =
        ini.get_double("identify", "max_temp_drift", cfg.ident.steady.max_temp_drift);
    cfg.ident.steady.window_hours =
        static_cast<int>(ini.get_int("identify", "window_hours", cfg.ident.steady.window_hours));
    cfg.ident.steady.night_start =
        static_cast<int>(ini.get_int("identify", "night_start", cfg.ident.steady.night_start));
    cfg.ident.steady.night_end =
        static_cast<int>(ini.get_int("identify", "night_end", cfg.ident.steady.night_end));
    if (ini.has("identify", "r_m_grid")) cfg.ident.r_m_grid = ini.get_list("identify", "r_m_grid");
    const std::string reg = ini.get_string("identify", "regressor", "ridge");
    if (reg == "ridge")
        cfg.ident.disturbance.kind = DisturbanceHyperparams::Kind::kRidge;
    else if (reg == "kernel")
        cfg.ident.disturbance.kind = DisturbanceHyperparams::Kind::kKernel;
    else
        throw std::runtime_error(path + ": [identify] regressor must be ridge or kernel");
    cfg.ident.disturbance.penalties =
        ini.get_list("identify", "penalties", cfg.ident.disturbance.penalties);
    cfg.ident.disturbance.kernel_gamma =
        ini.get_double("identify", "kernel_gamma", cfg.ident.disturbance.kernel_gamma);

    cfg.mc_samples =
        static_cast<std::size_t>(ini.get_int("analysis", "mc_samples", 1000000));
    cfg.balance_offset = ini.get_double("analysis", "balance_offset", 8.0);

    cfg.seed = static_cast<std::uint64_t>(ini.get_int("run", "seed", 0));
    return cfg;
}

ScenarioConfig RunConfig::scenario(PolicyKind kind, DisturbanceModel disturbance) const {
    ScenarioConfig sc;
    sc.truth_params = truth;
    sc.truth_profile = truth_profile;
    sc.controller_params = thermal;
    sc.disturbance = std::move(disturbance);
    sc.plant = plant;
    sc.defrost = defrost;
    sc.defrost_enabled = defrost_enabled;
    sc.policy = benchmark_policy;
    sc.policy.kind = kind;
    sc.mpc = mpc;
    sc.forecast_error = forecast_error;
    sc.start = scenario_start;
    sc.duration_days = scenario_days;
    sc.initial_t_in = initial_t_in;
    sc.internal_dt = internal_dt;
    sc.seed = seed;
    return sc;
}

}  // namespace heatctl

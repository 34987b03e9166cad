#pragma once

#include <map>
#include <string>
#include <vector>

#include "heatctl/analysis.hpp"
#include "heatctl/identification.hpp"
#include "heatctl/simulation.hpp"

namespace heatctl {

/// Minimal INI-style file: [section] headers, key = value lines,
/// '#' or ';' comments. Values are scalars or comma-separated lists.
class IniFile {
  public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Everything a CLI run needs, loaded from one config file. See
/// configs/default.ini for the documented schema.
struct RunConfig {
    // [paths]
    std::string weather_csv;
    std::string training_csv;
    std::string output_dir = "out";

    // [thermal] - controller's model, or identify = true to fit it
    bool identify_thermal = false;
    ThermalParams thermal{2.04, 1.06, 6.5, 20.6};

    // [truth] - plant reality for simulations (defaults to [thermal])
    ThermalParams truth{2.04, 1.06, 6.5, 20.6};
    ExogenousProfile truth_profile;

    PlantConfig plant;
    DefrostConfig defrost;
    bool defrost_enabled = true;

    MpcSettings mpc;
    SupervisoryPolicy benchmark_policy;
    ForecastErrorModel forecast_error;

    // [scenario]
    PolicyKind scenario_policy = PolicyKind::kMpc;  // policy run by `simulate`
    TimePoint scenario_start = 0;
    double scenario_days = 1.0;
    double internal_dt = 0.25;
    double initial_t_in = 20.0;

    // [identify]
    IdentifyOptions ident;

    // [analysis]
    std::size_t mc_samples = 1000000;
    double balance_offset = 8.0;

    std::uint64_t seed = 0;

    static RunConfig load(const std::string& path);

    /// Assembles a simulation scenario for the given supervisory policy.
    /// The disturbance model must be supplied by the caller (identified or
    /// built from the truth profile).
    ScenarioConfig scenario(PolicyKind kind, DisturbanceModel disturbance) const;
};

}  // namespace heatctl

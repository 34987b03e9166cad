#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatctl/controller.hpp"
#include "heatctl/identification.hpp"
#include "heatctl/plant.hpp"
#include "heatctl/thermal_model.hpp"
#include "heatctl/weather.hpp"

namespace heatctl {

/// Ground-truth exogenous heat generator for synthetic scenarios:
/// base load + solar pickup + a 24-hour occupancy shape.
struct ExogenousProfile {
    double base_kw = 0.0;
    double solar_kw_per_100wm2 = 0.0;
    std::vector<double> hourly_extra;  // 24 values, kW; empty = zeros
};

/// One value per weather sample.
std::vector<double> truth_exogenous(const WeatherSeries& w, const ExogenousProfile& profile);

struct ForecastErrorModel {
    double sigma_t_out = 0.0;  // degC
    double sigma_ghi = 0.0;    // W/m2
    double sigma_wind = 0.0;   // m/s
};

struct Forecast {
    std::vector<TimePoint> timestamps;  // step start instants
    std::vector<double> t_out, ghi, wind;
};

/// True future values plus seeded additive Gaussian noise; sigma = 0
/// reproduces the truth exactly. Requires coverage of the full horizon.
Forecast make_forecast(const WeatherSeries& w, TimePoint start, int horizon_steps,
                       const ForecastErrorModel& err, std::uint64_t seed);

enum class PolicyKind { kMpc, kConstant, kSchedule };

const char* to_string(PolicyKind kind);

struct SupervisoryPolicy {
    PolicyKind kind = PolicyKind::kConstant;
    double constant_setpoint = 21.0;
    // schedule benchmark: day set-point between the switch hours
    double day_setpoint = 22.0;
    double night_setpoint = 20.0;
    int day_start_hour = 6;
    int night_start_hour = 23;
};

/// Occupant reference temperature schedule for the MPC objective.
struct ReferenceSchedule {
    double day_ref = 20.0;
    double night_ref = 18.0;
    int day_start = 7;
    int day_end = 22;  // exclusive
    double value_at(TimePoint t) const;
};

struct MpcSettings {
    int horizon = 24;
    double dt = 1.0;  // h
    ReferenceSchedule reference;
    double comfort_band = 3.0;  // degC
    double price_demand = 0.8;  // $/kW
    std::vector<double> price_energy_by_hour = {0.15};  // $/kWh; 1 or 24 values
    double price_emission = 0.0;                        // $/kg
    std::vector<double> emission_intensity_by_hour;     // kg/kWh; empty, 1 or 24
    std::optional<double> tracking_tau;
    std::optional<double> setpoint_rate_limit = 2.0;  // degC/h
    TuningState tuning;
    ComfortContext comfort;
};

struct ScenarioConfig {
    ThermalParams truth_params{2.04, 1.06, 6.5, 20.6};  // plant reality
    ExogenousProfile truth_profile;
    ThermalParams controller_params{2.04, 1.06, 6.5, 20.6};  // controller's model
    DisturbanceModel disturbance;  // controller's q_e predictor
    PlantConfig plant;
    DefrostConfig defrost;
    bool defrost_enabled = true;
    SupervisoryPolicy policy;
    MpcSettings mpc;
    ForecastErrorModel forecast_error;
    TimePoint start = 0;
    double duration_days = 1.0;
    double initial_t_in = 20.0;
    double internal_dt = 0.25;  // device/house step, h
    std::uint64_t seed = 0;
};

struct SimRecord {
    TimePoint time;
    double t_in;      // degC, at step start
    double setpoint;  // degC in effect
    double t_out;     // degC (not exported to CSV; joined from weather)
    double q_c;       // net thermal power during the step, kW
    double p_hp;      // compressor + fans electric power, kW
    double p_elem;    // element electric power, kW
    std::size_t stage;
    bool defrost;
    double ppd_pct;
    double pi_t;  // effective discomfort price in force ($/degC/h; 0 for benchmarks)
};

struct SimTrace {
    std::vector<SimRecord> records;
    double dt_hours = 0.25;
    std::string policy_label;
    int cop_clamp_events = 0;
};

/// Closed-loop simulation: the supervisory policy emits set-points (MPC at
/// its own cadence), the emulated device-level controller delivers heat,
/// and the truth model advances the indoor temperature.
SimTrace run_closed_loop(const ScenarioConfig& cfg, const WeatherSeries& weather);

/// Trace CSV schema (header exactly):
/// timestamp_iso8601,t_in_c,setpoint_c,q_c_kw,p_hp_kw,p_elem_kw,stage,defrost,ppd_pct,pi_t
void save_trace_csv(const SimTrace& trace, const std::string& path);

/// Loads a trace CSV; t_out is NaN until attach_outdoor is called.
SimTrace load_trace_csv(const std::string& path);

/// Joins outdoor temperatures onto a loaded trace by timestamp.
void attach_outdoor(SimTrace& trace, const WeatherSeries& weather);

}  // namespace heatctl

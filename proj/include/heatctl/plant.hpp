#pragma once

#include <cstddef>
#include <vector>

#include "heatctl/rng.hpp"

namespace heatctl {

/// Heating plant: variable-speed heat pump plus staged electric resistance
/// backup elements, with an outdoor-temperature-dependent COP curve.
struct PlantConfig {
    double p_bar = 4.5;     // heat pump electric capacity, kW
    double p_r_bar = 19.2;  // total element capacity, kW
    std::vector<double> stages = {9.6, 14.4, 19.2};  // ascending stage powers, kW

    // COP(t_out) = cop_c0 + cop_c1 t + cop_c2 t^2, clamped below at cop_floor.
    double cop_c0 = 2.5;
    double cop_c1 = 0.06;
    double cop_c2 = 0.0005;
    double cop_floor = 1.2;
    double cop_t_min = -25.0;  // declared operating range, degC
    double cop_t_max = 15.0;

    // Device-level emulation. The thermostat loop is PI on the tracking
    // error with gain kp = kp_scale * eta * p_bar per degC.
    double kp_scale = 0.5;
    double ki_per_hour = 4.0;     // integral gain = ki_per_hour * kp, per h
    double stage_up_error = 1.0;  // degC of error that arms the next stage
    double stage_dwell = 0.25;    // h the error must persist before staging up
    double min_on_time = 0.25;    // h
    double min_off_time = 0.25;   // h

    void validate() const;
};

/// COP at an outdoor temperature. Temperatures outside the declared range
/// are clamped to it; *clamped is set when provided so callers can report.
double cop(const PlantConfig& cfg, double t_out, bool* clamped = nullptr);

/// Electric power drawn to deliver q_c kW of heat at COP eta:
/// P = q_c/eta + (1 - 1/eta) * max{0, q_c - eta*p_bar}.
/// Throws std::domain_error when q_c exceeds plant_capacity.
double electric_power(const PlantConfig& cfg, double q_c, double eta);

/// Maximum deliverable thermal power: eta * p_bar + p_r_bar.
double plant_capacity(const PlantConfig& cfg, double eta);

struct DefrostConfig {
    double trigger_temp_max = 0.0;  // events possible only at or below, degC
    double rh_min = 70.0;           // relative humidity band, %
    double rh_max = 80.0;
    double events_per_day = 2.7;  // expected starts per day inside the band
    double event_duration = 0.5;  // h
    std::size_t element_stage = 1;  // 1-based stage engaged during defrost

    void validate() const;
};

struct DeviceState {
    std::size_t stage = 0;       // active element stage, 0 = all off
    double stage_on_hold = 0.0;  // h of minimum-on remaining for current stage
    std::vector<double> stage_off_hold;  // per-stage minimum-off remaining, h
    double error_dwell = 0.0;  // h the error has exceeded the stage-up threshold
    double integral = 0.0;     // PI integral state, degC*h
    bool defrost = false;
    double defrost_remaining = 0.0;    // h
    std::size_t defrost_stage = 0;     // element stage to run while defrosting
};

struct DeviceOutput {
    double q_c = 0.0;    // net thermal power into the house, kW
    double p_hp = 0.0;   // compressor + fans electric power, kW
    double p_elem = 0.0; // heating element electric power, kW
    std::size_t stage = 0;  // element stage in effect this step
};

/// One device-level control step of duration dt. The heat pump modulates to
/// track the set-point; resistance stages engage in ascending order when the
/// tracking error persists, honoring minimum on/off times. During a defrost
/// event the heat pump draws heat from indoors and the configured element
/// stage runs.
DeviceOutput device_controller_step(DeviceState& state, double setpoint, double t_in,
                                    const PlantConfig& cfg, double eta, double dt);

/// Advances the defrost state. Inside the trigger band a new event starts
/// with probability events_per_day * dt / 24 per step. Returns true when an
/// event starts this step.
bool defrost_step(DeviceState& state, double t_out, double rh, Rng& rng,
                  const DefrostConfig& cfg, double dt);

}  // namespace heatctl

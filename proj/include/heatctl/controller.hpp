#pragma once

#include <utility>
#include <vector>

#include "heatctl/comfort.hpp"
#include "heatctl/ocp.hpp"
#include "heatctl/timeutil.hpp"

namespace heatctl {

/// Non-temperature PPD inputs held fixed when scoring a temperature
/// trajectory. Mean radiant temperature is taken equal to the air
/// temperature.
struct ComfortContext {
    double rel_humidity_pct = 40.0;
    double air_speed_ms = 0.1;
    double met = 1.1;
    double clo = 1.0;

    ComfortInputs at(double air_temp_c) const {
        return ComfortInputs{air_temp_c, air_temp_c, rel_humidity_pct, air_speed_ms, met, clo};
    }
};

double ppd_at(const ComfortContext& ctx, double air_temp_c);
double average_ppd(const ComfortContext& ctx, const std::vector<double>& temperatures);

/// Discomfort-price tuning state. The base price is re-selected
/// periodically by sweeping the grid; the effective price is the base
/// scaled by the day or night multiplier.
struct TuningState {
    double pi_t_base = 0.1;  // $/degC/h
    bool ever_tuned = false;
    TimePoint last_tuned = 0;
    std::vector<double> sweep_grid;  // ascending, positive
    double day_multiplier = 1.1;
    double night_multiplier = 0.2;
    double ppd_ceiling_pct = 10.0;
    int day_start_hour = 7;
    int day_end_hour = 22;  // exclusive
    double period_h = 12.0;
};

/// 12 log-spaced candidates over [0.01, 5] $/degC/h.
std::vector<double> default_sweep_grid();

double day_night_modulation(double pi_t_base, double hour, const TuningState& tuning);

struct TuneResult {
    double pi_t = 0.0;
    bool ceiling_met = false;  // false: no candidate met the ceiling, grid max returned
    std::vector<std::pair<double, double>> sweep;  // (candidate, planned avg PPD %)
};

/// Sweeps the candidate grid in ascending order, solving the open-loop
/// problem with a flat discomfort price and scoring the planned
/// temperatures; returns the lowest candidate whose time-average PPD meets
/// the ceiling. The template's price_discomfort is overwritten per
/// candidate.
TuneResult tune_discomfort_price(OcpSpec spec_template, const TuningState& tuning,
                                 const ComfortContext& ctx);

struct MpcStepResult {
    double setpoint = 0.0;
    OcpPlan plan;
    bool retuned = false;
    TuneResult tune;  // populated when retuned
};

/// One receding-horizon step: retunes the discomfort price if due, fills
/// the modulated price trajectory, solves, and returns the first planned
/// set-point. The template must carry forecasts for the full horizon with
/// price_discomfort left empty or ignored.
MpcStepResult mpc_step(double t_in, OcpSpec spec_template, TuningState& tuning,
                       const ComfortContext& ctx, TimePoint now);

}  // namespace heatctl

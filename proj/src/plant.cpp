#include "heatctl/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatctl {

void PlantConfig::validate() const {
    if (!(p_bar > 0.0)) throw std::invalid_argument("PlantConfig: p_bar must be > 0");
    if (!(p_r_bar >= 0.0)) throw std::invalid_argument("PlantConfig: p_r_bar must be >= 0");
    if (stages.empty()) throw std::invalid_argument("PlantConfig: stages must be non-empty");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (!(stages[i] > 0.0)) throw std::invalid_argument("PlantConfig: stage powers must be > 0");
        if (i > 0 && !(stages[i] > stages[i - 1]))
            throw std::invalid_argument("PlantConfig: stages must be ascending");
    }
    if (std::abs(stages.back() - p_r_bar) > 1e-9)
        throw std::invalid_argument("PlantConfig: last stage must equal p_r_bar");
    if (!(cop_floor > 1.0)) throw std::invalid_argument("PlantConfig: cop_floor must be > 1");
    if (!(cop_t_min < cop_t_max))
        throw std::invalid_argument("PlantConfig: cop operating range is empty");
    // The quadratic must stay above the floor over the declared range. Its
    // extremum and the endpoints cover all candidates.
    auto curve = [&](double t) { return cop_c0 + cop_c1 * t + cop_c2 * t * t; };
    double worst = std::min(curve(cop_t_min), curve(cop_t_max));
    if (cop_c2 != 0.0) {
        const double t_ext = -cop_c1 / (2.0 * cop_c2);
        if (t_ext > cop_t_min && t_ext < cop_t_max) worst = std::min(worst, curve(t_ext));
    }
    if (!(worst >= cop_floor))
        throw std::invalid_argument("PlantConfig: COP curve dips below cop_floor in range");
}

void DefrostConfig::validate() const {
    if (!(event_duration > 0.0))
        throw std::invalid_argument("DefrostConfig: event_duration must be > 0");
    if (events_per_day < 0.0 || events_per_day > 24.0 / event_duration)
        throw std::invalid_argument("DefrostConfig: events_per_day outside [0, 24/duration]");
    if (!(rh_min <= rh_max)) throw std::invalid_argument("DefrostConfig: rh band is empty");
}

double cop(const PlantConfig& cfg, double t_out, bool* clamped) {
    double t = t_out;
    if (t < cfg.cop_t_min || t > cfg.cop_t_max) {
        t = std::clamp(t, cfg.cop_t_min, cfg.cop_t_max);
        if (clamped) *clamped = true;
    } else if (clamped) {
        *clamped = false;
    }
    const double curve = cfg.cop_c0 + cfg.cop_c1 * t + cfg.cop_c2 * t * t;
    return std::max(cfg.cop_floor, curve);
}

double plant_capacity(const PlantConfig& cfg, double eta) {
    return eta * cfg.p_bar + cfg.p_r_bar;
}

double electric_power(const PlantConfig& cfg, double q_c, double eta) {
    if (q_c < 0.0) throw std::domain_error("electric_power: q_c must be >= 0");
    if (q_c > plant_capacity(cfg, eta) + 1e-9)
        throw std::domain_error("electric_power: thermal demand exceeds plant capacity");
    return q_c / eta + (1.0 - 1.0 / eta) * std::max(0.0, q_c - eta * cfg.p_bar);
}

namespace {

void tick_timers(DeviceState& state, double dt) {
    state.stage_on_hold = std::max(0.0, state.stage_on_hold - dt);
    for (double& h : state.stage_off_hold) h = std::max(0.0, h - dt);
}

}  // namespace

DeviceOutput device_controller_step(DeviceState& state, double setpoint, double t_in,
                                    const PlantConfig& cfg, double eta, double dt) {
    if (state.stage_off_hold.size() != cfg.stages.size())
        state.stage_off_hold.assign(cfg.stages.size(), 0.0);

    const double error = setpoint - t_in;
    const double kp = cfg.kp_scale * eta * cfg.p_bar;
    const double ki = cfg.ki_per_hour * kp;
    const double hp_max = eta * cfg.p_bar;

    // PI demand with conditional integration: the integral only winds while
    // the heat pump output is unsaturated.
    const double demand = kp * error + ki * state.integral;
    const bool saturated_high = demand >= hp_max && error > 0.0;
    const bool saturated_low = demand <= 0.0 && error < 0.0;
    if (!saturated_high && !saturated_low) state.integral += error * dt;

    const double hp_thermal = std::clamp(demand, 0.0, hp_max);

    // Staging: a persistent tracking error walks the stages up one at a
    // time; a satisfied thermostat sheds one stage per step. Minimum on/off
    // times gate both directions.
    tick_timers(state, dt);
    if (error > cfg.stage_up_error) {
        state.error_dwell += dt;
        // the error must persist strictly longer than the dwell time
        if (state.error_dwell > cfg.stage_dwell && state.stage < cfg.stages.size() &&
            state.stage_on_hold <= 0.0 && state.stage_off_hold[state.stage] <= 0.0) {
            ++state.stage;
            state.stage_on_hold = cfg.min_on_time;
            state.error_dwell = 0.0;
        }
    } else {
        state.error_dwell = 0.0;
        // shed one stage when the thermostat is satisfied and the next
        // configuration down can still carry the estimated load
        if (error <= 0.0 && state.stage > 0 && state.stage_on_hold <= 0.0) {
            const double lower_capacity =
                hp_max + (state.stage > 1 ? cfg.stages[state.stage - 2] : 0.0);
            if (demand <= lower_capacity - 0.05 * cfg.stages[state.stage - 1]) {
                state.stage_off_hold[state.stage - 1] = cfg.min_off_time;
                --state.stage;
                if (state.stage > 0) state.stage_on_hold = cfg.min_on_time;
            }
        }
    }

    DeviceOutput out;
    if (state.defrost) {
        // Reversed cycle: the compressor keeps drawing power while heat is
        // pulled from indoors; the event's element stage covers the supply air.
        const std::size_t ds = std::min(state.defrost_stage, cfg.stages.size());
        const double elem_power = ds >= 1 ? cfg.stages[ds - 1] : 0.0;
        out.p_hp = hp_thermal / eta;
        out.p_elem = elem_power;
        out.q_c = -hp_thermal + elem_power;
        out.stage = ds;
        return out;
    }

    const double elem_power = state.stage > 0 ? cfg.stages[state.stage - 1] : 0.0;
    out.p_hp = hp_thermal / eta;
    out.p_elem = elem_power;
    out.q_c = hp_thermal + elem_power;
    out.stage = state.stage;
    return out;
}

bool defrost_step(DeviceState& state, double t_out, double rh, Rng& rng,
                  const DefrostConfig& cfg, double dt) {
    if (state.defrost) {
        state.defrost_remaining -= dt;
        if (state.defrost_remaining <= 1e-12) {
            state.defrost = false;
            state.defrost_remaining = 0.0;
        }
    }
    // One draw per step regardless of conditions, so the stream position
    // depends only on the step count. Event starts are memoryless Bernoulli
    // trials; a start during an ongoing event extends it.
    const double u = rng.uniform();
    const bool in_band = t_out <= cfg.trigger_temp_max && rh >= cfg.rh_min && rh <= cfg.rh_max;
    if (!in_band || cfg.events_per_day <= 0.0) return false;
    if (u <= cfg.events_per_day * dt / 24.0) {
        state.defrost = true;
        state.defrost_remaining = std::max(state.defrost_remaining, cfg.event_duration);
        state.defrost_stage = cfg.element_stage;
        return true;
    }
    return false;
}

}  // namespace heatctl

#pragma once

#include <span>
#include <vector>

namespace heatctl {

/// Lumped thermal circuit of a house: one capacitive indoor node coupled to
/// the outdoor air through r_out and to a constant-temperature deep mass
/// through r_m.
struct ThermalParams {
    double r_out;  // indoor<->outdoor resistance, degC/kW
    double r_m;    // indoor<->deep-mass resistance, degC/kW
    double c;      // indoor capacitance, kWh/degC
    double t_m;    // deep-mass temperature, degC

    /// Throws std::invalid_argument when a resistance or the capacitance
    /// is not strictly positive.
    void validate() const;
};

/// Exact zero-order-hold discretization of the circuit.
struct EffectiveModel {
    double r;   // effective resistance, degC/kW
    double a;   // discrete dynamics parameter, 0 < a < 1
    double dt;  // step duration, h
};

struct StateInput {
    double t;      // indoor temperature, degC
    double theta;  // effective boundary temperature, degC
    double q_c;    // controlled HVAC thermal power, kW
    double q_e;    // exogenous thermal power, kW
};

/// Resistance-weighted blend of the deep-mass and outdoor temperatures.
/// Always lies between t_m and t_out.
double effective_boundary_temperature(const ThermalParams& p, double t_out);

/// Parallel combination r_m * r_out / (r_m + r_out).
double effective_resistance(const ThermalParams& p);

/// a = exp(-dt / (R * C)) with R from effective_resistance.
EffectiveModel discretize(const ThermalParams& p, double dt);

/// One exact discrete step:
/// T' = a T + (1 - a) [theta + R (q_c + q_e)].
double step(const EffectiveModel& m, const StateInput& s);

/// Chains step over the input sequence. The t field of each input is
/// ignored; the trajectory state is used instead. Returns inputs.size() + 1
/// temperatures including t0.
std::vector<double> simulate_trajectory(const EffectiveModel& m, double t0,
                                        std::span<const StateInput> inputs);

}  // namespace heatctl

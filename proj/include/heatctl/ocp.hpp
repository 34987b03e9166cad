#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "heatctl/lp.hpp"

namespace heatctl {

/// One open-loop optimal control instance over a horizon of L steps.
/// Forecast arrays (theta_hat, q_e_hat, eta_hat, price_energy,
/// emission_intensity) index steps k..k+L-1; reference arrays (t_ref,
/// price_discomfort) index the resulting temperatures k+1..k+L.
struct OcpSpec {
    int horizon = 24;  // L
    double dt = 1.0;   // h
    double t_init = 20.0;

    std::vector<double> theta_hat;   // effective boundary temperature, degC
    std::vector<double> q_e_hat;     // exogenous thermal power, kW
    std::vector<double> eta_hat;     // COP forecast

    std::vector<double> price_energy;      // $/kWh, strictly positive
    double price_demand = 0.0;             // $/kW
    std::vector<double> price_discomfort;  // $/degC/h
    std::vector<double> t_ref;             // degC
    double comfort_band = 3.0;             // delta, degC

    double effective_resistance = 0.7;  // R, degC/kW
    double dynamics_a = 0.8;            // a

    double p_bar = 4.5;    // heat pump electric capacity, kW
    double p_r_bar = 19.2; // element capacity, kW

    double price_emission = 0.0;               // $/kg; 0 disables the term
    std::vector<double> emission_intensity;    // kg/kWh, length L when priced

    std::optional<double> tracking_tau;         // h; adds set-point variables
    std::optional<double> setpoint_rate_limit;  // degC/h
    // anchor for the first rate-limited move; unset = first command free
    std::optional<double> previous_setpoint;

    void validate() const;
};

/// Index map of the assembled LP variables.
/// Order: T(1..L), Qc(0..L-1), P(0..L-1), s(1..L), z, then u(0..L-1) when
/// the tracking model is enabled.
struct OcpVarMap {
    int horizon = 0;
    bool has_setpoint_vars = false;
    int t(int l) const { return l; }
    int q_c(int l) const { return horizon + l; }
    int p(int l) const { return 2 * horizon + l; }
    int s(int l) const { return 3 * horizon + l; }
    int peak() const { return 4 * horizon; }
    int u(int l) const { return 4 * horizon + 1 + l; }
    int num_vars() const { return 4 * horizon + 1 + (has_setpoint_vars ? horizon : 0); }
};

struct ObjectiveBreakdown {
    double demand = 0.0;
    double energy = 0.0;
    double discomfort = 0.0;
    double emission = 0.0;
    double total() const { return demand + energy + discomfort + emission; }
};

struct OcpPlan {
    std::vector<double> setpoints;      // commanded set-point per step
    std::vector<double> temperatures;   // planned indoor temperature, k+1..k+L
    std::vector<double> thermal_power;  // Qc, k..k+L-1
    std::vector<double> electric_power; // P, k..k+L-1
    double peak = 0.0;
    ObjectiveBreakdown cost;
    bool comfort_relaxed = false;  // band widened to restore feasibility
    double band_used = 0.0;        // delta actually enforced
    bool fallback = false;         // reference tracking fallback plan
};

/// Assembles the epigraph LP: dynamics equalities, two affine power
/// majorants per step, peak epigraph, absolute-deviation comfort slacks,
/// and capacity bounds.
std::pair<LpProblem, OcpVarMap> build_ocp_lp(const OcpSpec& spec);

/// Solves the instance and reconstructs a verified plan. On infeasibility
/// the comfort band widens in 0.5 degC increments up to +2 degC (plan
/// flagged comfort_relaxed); if still infeasible, falls back to reference
/// tracking.
OcpPlan solve_ocp(const OcpSpec& spec);

}  // namespace heatctl

#include "heatctl/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace heatctl {

void OcpSpec::validate() const {
    if (horizon < 1) throw std::invalid_argument("OcpSpec: horizon must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("OcpSpec: dt must be > 0");
    const auto L = static_cast<std::size_t>(horizon);
    auto check_len = [&](const std::vector<double>& v, const char* name) {
        if (v.size() != L)
            throw std::invalid_argument(std::string("OcpSpec: ") + name + " must have length L");
    };
    check_len(theta_hat, "theta_hat");
    check_len(q_e_hat, "q_e_hat");
    check_len(eta_hat, "eta_hat");
    check_len(price_energy, "price_energy");
    check_len(price_discomfort, "price_discomfort");
    check_len(t_ref, "t_ref");
    for (double v : price_energy)
        if (!(v > 0.0))
            throw std::invalid_argument(
                "OcpSpec: price_energy must be strictly positive (keeps the power epigraph tight)");
    for (double v : price_discomfort)
        if (!(v >= 0.0)) throw std::invalid_argument("OcpSpec: price_discomfort must be >= 0");
    if (!(price_demand >= 0.0)) throw std::invalid_argument("OcpSpec: price_demand must be >= 0");
    if (!(comfort_band >= 0.0)) throw std::invalid_argument("OcpSpec: comfort_band must be >= 0");
    for (double v : eta_hat)
        if (!(v > 0.0)) throw std::invalid_argument("OcpSpec: eta_hat must be > 0");
    if (!(dynamics_a > 0.0 && dynamics_a < 1.0))
        throw std::invalid_argument("OcpSpec: dynamics_a must be in (0, 1)");
    if (!(effective_resistance > 0.0))
        throw std::invalid_argument("OcpSpec: effective_resistance must be > 0");
    if (price_emission > 0.0 && emission_intensity.size() != L)
        throw std::invalid_argument("OcpSpec: emission_intensity must have length L when priced");
    if (price_emission < 0.0) throw std::invalid_argument("OcpSpec: price_emission must be >= 0");
    if (tracking_tau && !(*tracking_tau > 0.0))
        throw std::invalid_argument("OcpSpec: tracking_tau must be > 0");
    if (setpoint_rate_limit && !(*setpoint_rate_limit > 0.0))
        throw std::invalid_argument("OcpSpec: setpoint_rate_limit must be > 0");
}

namespace {

LpProblem assemble(const OcpSpec& spec, const OcpVarMap& map, double band) {
    const int L = spec.horizon;
    const double a = spec.dynamics_a;
    const double r = spec.effective_resistance;
    LpProblem lp(static_cast<std::size_t>(map.num_vars()));

    auto row = [&]() { return std::vector<double>(lp.n, 0.0); };

    // dynamics: T(l) - a T(l-1) - (1-a) R Qc(l) = (1-a)(theta(l) + R qe(l))
    for (int l = 0; l < L; ++l) {
        auto eq = row();
        eq[map.t(l)] = 1.0;
        double rhs = (1.0 - a) * (spec.theta_hat[l] + r * spec.q_e_hat[l]);
        if (l == 0)
            rhs += a * spec.t_init;
        else
            eq[map.t(l - 1)] = -a;
        eq[map.q_c(l)] = -(1.0 - a) * r;
        lp.add_eq(std::move(eq), rhs);
    }

    // tracking model: T(l) = a_tau T(l-1) + (1 - a_tau) u(l)
    if (map.has_setpoint_vars) {
        const double a_tau = std::exp(-spec.dt / *spec.tracking_tau);
        for (int l = 0; l < L; ++l) {
            auto eq = row();
            eq[map.t(l)] = 1.0;
            double rhs = 0.0;
            if (l == 0)
                rhs += a_tau * spec.t_init;
            else
                eq[map.t(l - 1)] = -a_tau;
            eq[map.u(l)] = -(1.0 - a_tau);
            lp.add_eq(std::move(eq), rhs);
        }
    }

    // power epigraph: the two affine majorants of the convex power map
    for (int l = 0; l < L; ++l) {
        auto r1 = row();
        r1[map.q_c(l)] = 1.0 / spec.eta_hat[l];
        r1[map.p(l)] = -1.0;
        lp.add_ineq(std::move(r1), 0.0);

        auto r2 = row();
        r2[map.q_c(l)] = 1.0;
        r2[map.p(l)] = -1.0;
        lp.add_ineq(std::move(r2), (spec.eta_hat[l] - 1.0) * spec.p_bar);
    }

    // peak epigraph: P(l) <= z
    for (int l = 0; l < L; ++l) {
        auto rz = row();
        rz[map.p(l)] = 1.0;
        rz[map.peak()] = -1.0;
        lp.add_ineq(std::move(rz), 0.0);
    }

    // comfort slacks: s(l) >= |T(l) - t_ref(l)|
    for (int l = 0; l < L; ++l) {
        auto r1 = row();
        r1[map.t(l)] = 1.0;
        r1[map.s(l)] = -1.0;
        lp.add_ineq(std::move(r1), spec.t_ref[l]);
        auto r2 = row();
        r2[map.t(l)] = -1.0;
        r2[map.s(l)] = -1.0;
        lp.add_ineq(std::move(r2), -spec.t_ref[l]);
    }

    // set-point rate limit between consecutive commands; the first command
    // is anchored to the previously issued set-point when one is known
    if (spec.setpoint_rate_limit) {
        const double max_delta = *spec.setpoint_rate_limit * spec.dt;
        auto cmd = [&](int l) { return map.has_setpoint_vars ? map.u(l) : map.t(l); };
        for (int l = 0; l < L; ++l) {
            if (l == 0 && !spec.previous_setpoint) continue;
            auto r1 = row();
            auto r2 = row();
            r1[cmd(l)] = 1.0;
            r2[cmd(l)] = -1.0;
            double rhs1 = max_delta, rhs2 = max_delta;
            if (l == 0) {
                rhs1 += *spec.previous_setpoint;
                rhs2 -= *spec.previous_setpoint;
            } else {
                r1[cmd(l - 1)] = -1.0;
                r2[cmd(l - 1)] = 1.0;
            }
            lp.add_ineq(std::move(r1), rhs1);
            lp.add_ineq(std::move(r2), rhs2);
        }
    }

    // bounds and objective
    for (int l = 0; l < L; ++l) {
        lp.lo[map.q_c(l)] = 0.0;
        lp.hi[map.q_c(l)] = spec.eta_hat[l] * spec.p_bar + spec.p_r_bar;
        lp.lo[map.p(l)] = 0.0;
        lp.lo[map.s(l)] = 0.0;
        lp.hi[map.s(l)] = band;
        const double mu = spec.price_emission > 0.0 ? spec.emission_intensity[l] : 0.0;
        lp.c[map.p(l)] = spec.dt * (spec.price_energy[l] + spec.price_emission * mu);
        lp.c[map.s(l)] = spec.dt * spec.price_discomfort[l];
    }
    lp.lo[map.peak()] = 0.0;
    lp.c[map.peak()] = spec.price_demand;
    return lp;
}

double eq12_power(double q_c, double eta, double p_bar) {
    return q_c / eta + (1.0 - 1.0 / eta) * std::max(0.0, q_c - eta * p_bar);
}

OcpPlan extract_plan(const OcpSpec& spec, const OcpVarMap& map, const LpSolution& sol,
                     double band, bool relaxed) {
    const int L = spec.horizon;
    OcpPlan plan;
    plan.band_used = band;
    plan.comfort_relaxed = relaxed;
    plan.temperatures.resize(L);
    plan.thermal_power.resize(L);
    plan.electric_power.resize(L);
    plan.setpoints.resize(L);
    for (int l = 0; l < L; ++l) {
        plan.temperatures[l] = sol.x[map.t(l)];
        plan.thermal_power[l] = sol.x[map.q_c(l)];
        plan.electric_power[l] = sol.x[map.p(l)];
        plan.setpoints[l] = map.has_setpoint_vars ? sol.x[map.u(l)] : sol.x[map.t(l)];
    }
    plan.peak = sol.x[map.peak()];

    ObjectiveBreakdown cost;
    cost.demand = spec.price_demand * plan.peak;
    for (int l = 0; l < L; ++l) {
        cost.energy += spec.dt * spec.price_energy[l] * plan.electric_power[l];
        cost.discomfort += spec.dt * spec.price_discomfort[l] *
                           std::abs(plan.temperatures[l] - spec.t_ref[l]);
        if (spec.price_emission > 0.0)
            cost.emission +=
                spec.dt * spec.price_emission * spec.emission_intensity[l] * plan.electric_power[l];
    }
    plan.cost = cost;

    // Post-solve verification: the epigraph must be tight (guaranteed by the
    // strictly positive energy price) and the plan must satisfy its own
    // invariants. A violation here is a solver defect, not user error.
    constexpr double tol = 1e-6;
    double t_prev = spec.t_init;
    for (int l = 0; l < L; ++l) {
        const double p_true =
            eq12_power(plan.thermal_power[l], spec.eta_hat[l], spec.p_bar);
        if (std::abs(plan.electric_power[l] - p_true) > tol)
            throw std::logic_error("solve_ocp: power epigraph not tight at step " +
                                   std::to_string(l));
        const double t_next =
            spec.dynamics_a * t_prev +
            (1.0 - spec.dynamics_a) * (spec.theta_hat[l] + spec.effective_resistance *
                                                               (plan.thermal_power[l] +
                                                                spec.q_e_hat[l]));
        if (std::abs(plan.temperatures[l] - t_next) > tol)
            throw std::logic_error("solve_ocp: dynamics chaining violated at step " +
                                   std::to_string(l));
        if (std::abs(plan.temperatures[l] - spec.t_ref[l]) > band + tol)
            throw std::logic_error("solve_ocp: comfort band violated at step " +
                                   std::to_string(l));
        t_prev = plan.temperatures[l];
    }
    return plan;
}

OcpPlan fallback_plan(const OcpSpec& spec) {
    // Reference tracking: invert the dynamics toward t_ref, clamped to the
    // plant's capability, so the thermostat always receives a set-point.
    const int L = spec.horizon;
    OcpPlan plan;
    plan.fallback = true;
    plan.band_used = spec.comfort_band;
    plan.setpoints = spec.t_ref;
    if (spec.setpoint_rate_limit) {
        // keep even the fallback commands slew-limited
        double prev = spec.previous_setpoint.value_or(plan.setpoints.front());
        const double max_delta = *spec.setpoint_rate_limit * spec.dt;
        for (double& sp : plan.setpoints) {
            sp = std::clamp(sp, prev - max_delta, prev + max_delta);
            prev = sp;
        }
    }
    plan.temperatures.resize(L);
    plan.thermal_power.resize(L);
    plan.electric_power.resize(L);
    const double a = spec.dynamics_a;
    const double r = spec.effective_resistance;
    double t = spec.t_init;
    for (int l = 0; l < L; ++l) {
        const double cap = spec.eta_hat[l] * spec.p_bar + spec.p_r_bar;
        double q = ((plan.setpoints[static_cast<std::size_t>(l)] - a * t) / (1.0 - a) -
                    spec.theta_hat[l]) / r -
                   spec.q_e_hat[l];
        q = std::clamp(q, 0.0, cap);
        t = a * t + (1.0 - a) * (spec.theta_hat[l] + r * (q + spec.q_e_hat[l]));
        plan.temperatures[l] = t;
        plan.thermal_power[l] = q;
        plan.electric_power[l] = eq12_power(q, spec.eta_hat[l], spec.p_bar);
        plan.cost.energy += spec.dt * spec.price_energy[l] * plan.electric_power[l];
        plan.cost.discomfort +=
            spec.dt * spec.price_discomfort[l] * std::abs(t - spec.t_ref[l]);
        if (spec.price_emission > 0.0)
            plan.cost.emission += spec.dt * spec.price_emission * spec.emission_intensity[l] *
                                  plan.electric_power[l];
        plan.peak = std::max(plan.peak, plan.electric_power[l]);
    }
    plan.cost.demand = spec.price_demand * plan.peak;
    return plan;
}

}  // namespace

std::pair<LpProblem, OcpVarMap> build_ocp_lp(const OcpSpec& spec) {
    spec.validate();
    OcpVarMap map;
    map.horizon = spec.horizon;
    map.has_setpoint_vars = spec.tracking_tau.has_value();
    return {assemble(spec, map, spec.comfort_band), map};
}

OcpPlan solve_ocp(const OcpSpec& spec) {
    spec.validate();
    OcpVarMap map;
    map.horizon = spec.horizon;
    map.has_setpoint_vars = spec.tracking_tau.has_value();

    for (double widen = 0.0; widen <= 2.0 + 1e-9; widen += 0.5) {
        const double band = spec.comfort_band + widen;
        LpProblem lp = assemble(spec, map, band);
        LpSolution sol = solve_lp(lp);
        if (sol.status == LpStatus::kOptimal)
            return extract_plan(spec, map, sol, band, widen > 0.0);
        if (sol.status != LpStatus::kInfeasible)
            throw std::runtime_error(std::string("solve_ocp: LP solver returned ") +
                                     to_string(sol.status));
    }
    return fallback_plan(spec);
}

}  // namespace heatctl

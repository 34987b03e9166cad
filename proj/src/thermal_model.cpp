#include "heatctl/thermal_model.hpp"

#include <cmath>
#include <stdexcept>

namespace heatctl {

void ThermalParams::validate() const {
    if (!(r_out > 0.0)) throw std::invalid_argument("ThermalParams: r_out must be > 0");
    if (!(r_m > 0.0)) throw std::invalid_argument("ThermalParams: r_m must be > 0");
    if (!(c > 0.0)) throw std::invalid_argument("ThermalParams: c must be > 0");
    if (!std::isfinite(t_m)) throw std::invalid_argument("ThermalParams: t_m must be finite");
}

double effective_boundary_temperature(const ThermalParams& p, double t_out) {
    return (p.r_out * p.t_m + p.r_m * t_out) / (p.r_m + p.r_out);
}

double effective_resistance(const ThermalParams& p) {
    return p.r_m * p.r_out / (p.r_m + p.r_out);
}

EffectiveModel discretize(const ThermalParams& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be > 0");
    const double r = effective_resistance(p);
    return EffectiveModel{r, std::exp(-dt / (r * p.c)), dt};
}

double step(const EffectiveModel& m, const StateInput& s) {
    return m.a * s.t + (1.0 - m.a) * (s.theta + m.r * (s.q_c + s.q_e));
}

std::vector<double> simulate_trajectory(const EffectiveModel& m, double t0,
                                        std::span<const StateInput> inputs) {
    std::vector<double> traj;
    traj.reserve(inputs.size() + 1);
    traj.push_back(t0);
    double t = t0;
    for (const StateInput& in : inputs) {
        t = step(m, StateInput{t, in.theta, in.q_c, in.q_e});
        traj.push_back(t);
    }
    return traj;
}

}  // namespace heatctl

#include "heatctl/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace heatctl {

double ppd_at(const ComfortContext& ctx, double air_temp_c) {
    return ppd(pmv(ctx.at(air_temp_c)));
}

double average_ppd(const ComfortContext& ctx, const std::vector<double>& temperatures) {
    if (temperatures.empty()) throw std::invalid_argument("average_ppd: empty trajectory");
    double sum = 0.0;
    for (double t : temperatures) sum += ppd_at(ctx, t);
    return sum / static_cast<double>(temperatures.size());
}

std::vector<double> default_sweep_grid() {
    std::vector<double> grid;
    const double lo = 0.01, hi = 5.0;
    const int count = 12;
    for (int i = 0; i < count; ++i)
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return grid;
}

double day_night_modulation(double pi_t_base, double hour, const TuningState& tuning) {
    if (hour < 0.0 || hour >= 24.0)
        throw std::invalid_argument("day_night_modulation: hour must be in [0, 24)");
    const bool day = hour >= tuning.day_start_hour && hour < tuning.day_end_hour;
    return pi_t_base * (day ? tuning.day_multiplier : tuning.night_multiplier);
}

TuneResult tune_discomfort_price(OcpSpec spec_template, const TuningState& tuning,
                                 const ComfortContext& ctx) {
    if (tuning.sweep_grid.empty())
        throw std::invalid_argument("tune_discomfort_price: empty sweep grid");
    TuneResult result;
    for (double candidate : tuning.sweep_grid) {
        spec_template.price_discomfort.assign(static_cast<std::size_t>(spec_template.horizon),
                                              candidate);
        const OcpPlan plan = solve_ocp(spec_template);
        const double avg = average_ppd(ctx, plan.temperatures);
        result.sweep.emplace_back(candidate, avg);
        if (avg <= tuning.ppd_ceiling_pct) {
            result.pi_t = candidate;
            result.ceiling_met = true;
            return result;
        }
    }
    result.pi_t = tuning.sweep_grid.back();
    result.ceiling_met = false;
    return result;
}

MpcStepResult mpc_step(double t_in, OcpSpec spec_template, TuningState& tuning,
                       const ComfortContext& ctx, TimePoint now) {
    spec_template.t_init = t_in;
    const auto L = static_cast<std::size_t>(spec_template.horizon);
    if (spec_template.theta_hat.size() != L || spec_template.q_e_hat.size() != L ||
        spec_template.eta_hat.size() != L)
        throw std::invalid_argument("mpc_step: forecasts do not cover the horizon");

    MpcStepResult result;
    const double elapsed_h =
        static_cast<double>(now - tuning.last_tuned) / static_cast<double>(kSecondsPerHour);
    if (!tuning.ever_tuned || elapsed_h >= tuning.period_h) {
        result.tune = tune_discomfort_price(spec_template, tuning, ctx);
        tuning.pi_t_base = result.tune.pi_t;
        tuning.ever_tuned = true;
        tuning.last_tuned = now;
        result.retuned = true;
    }

    spec_template.price_discomfort.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        const TimePoint at = now + static_cast<TimePoint>(
                                       std::llround((static_cast<double>(l) + 1.0) *
                                                    spec_template.dt * kSecondsPerHour));
        spec_template.price_discomfort[l] =
            day_night_modulation(tuning.pi_t_base, hour_of_day_fractional(at), tuning);
    }

    result.plan = solve_ocp(spec_template);
    result.setpoint = result.plan.setpoints.front();
    return result;
}

}  // namespace heatctl

#include "heatctl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "heatctl/csv.hpp"

namespace heatctl {

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::kMpc: return "mpc";
        case PolicyKind::kConstant: return "constant";
        case PolicyKind::kSchedule: return "schedule";
    }
    return "unknown";
}

std::vector<double> truth_exogenous(const WeatherSeries& w, const ExogenousProfile& profile) {
    if (!profile.hourly_extra.empty() && profile.hourly_extra.size() != 24)
        throw std::invalid_argument("ExogenousProfile: hourly_extra must have 24 values");
    std::vector<double> q_e(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        double v = profile.base_kw + profile.solar_kw_per_100wm2 * w.ghi[i] / 100.0;
        if (!profile.hourly_extra.empty())
            v += profile.hourly_extra[static_cast<std::size_t>(hour_of_day(w.timestamps[i]))];
        q_e[i] = v;
    }
    return q_e;
}

Forecast make_forecast(const WeatherSeries& w, TimePoint start, int horizon_steps,
                       const ForecastErrorModel& err, std::uint64_t seed) {
    if (horizon_steps < 1) throw std::invalid_argument("make_forecast: horizon must be >= 1");
    const TimePoint step =
        w.size() >= 2 ? w.timestamps[1] - w.timestamps[0] : kSecondsPerHour;
    Forecast fc;
    Rng rng(seed);
    for (int l = 0; l < horizon_steps; ++l) {
        const TimePoint at = start + static_cast<TimePoint>(l) * step;
        const std::size_t i = w.index_at(at);  // throws on insufficient coverage
        fc.timestamps.push_back(at);
        fc.t_out.push_back(w.t_out[i] + (err.sigma_t_out > 0.0
                                             ? rng.normal(0.0, err.sigma_t_out)
                                             : 0.0));
        fc.ghi.push_back(std::max(
            0.0, w.ghi[i] + (err.sigma_ghi > 0.0 ? rng.normal(0.0, err.sigma_ghi) : 0.0)));
        fc.wind.push_back(std::max(
            0.0, w.wind[i] + (err.sigma_wind > 0.0 ? rng.normal(0.0, err.sigma_wind) : 0.0)));
    }
    return fc;
}

double ReferenceSchedule::value_at(TimePoint t) const {
    const int h = hour_of_day(t);
    return (h >= day_start && h < day_end) ? day_ref : night_ref;
}

namespace {

double hourly_value(const std::vector<double>& by_hour, TimePoint t, const char* what) {
    if (by_hour.size() == 1) return by_hour[0];
    if (by_hour.size() == 24) return by_hour[static_cast<std::size_t>(hour_of_day(t))];
    throw std::invalid_argument(std::string(what) + ": expected 1 or 24 hourly values");
}

double schedule_setpoint(const SupervisoryPolicy& policy, TimePoint t) {
    const int h = hour_of_day(t);
    const bool day = h >= policy.day_start_hour && h < policy.night_start_hour;
    return day ? policy.day_setpoint : policy.night_setpoint;
}

}  // namespace

SimTrace run_closed_loop(const ScenarioConfig& cfg, const WeatherSeries& weather) {
    weather.validate();
    cfg.truth_params.validate();
    cfg.controller_params.validate();
    cfg.plant.validate();
    if (cfg.defrost_enabled) cfg.defrost.validate();
    if (!(cfg.internal_dt > 0.0))
        throw std::invalid_argument("ScenarioConfig: internal_dt must be > 0");
    const double steps_per_mpc_f = cfg.mpc.dt / cfg.internal_dt;
    const auto steps_per_mpc = static_cast<long>(std::llround(steps_per_mpc_f));
    if (std::abs(steps_per_mpc_f - static_cast<double>(steps_per_mpc)) > 1e-9 ||
        steps_per_mpc < 1)
        throw std::invalid_argument("ScenarioConfig: mpc.dt must be a multiple of internal_dt");

    const auto total_steps =
        static_cast<long>(std::llround(cfg.duration_days * 24.0 / cfg.internal_dt));

    const EffectiveModel truth_model = discretize(cfg.truth_params, cfg.internal_dt);
    const std::vector<double> q_e_truth = truth_exogenous(weather, cfg.truth_profile);

    SimTrace trace;
    trace.dt_hours = cfg.internal_dt;
    trace.policy_label = to_string(cfg.policy.kind);
    trace.records.reserve(static_cast<std::size_t>(total_steps));

    DeviceState device;
    Rng defrost_rng(derive_seed(cfg.seed, "defrost"));
    TuningState tuning = cfg.mpc.tuning;
    if (tuning.sweep_grid.empty()) tuning.sweep_grid = default_sweep_grid();

    const EffectiveModel controller_model = discretize(cfg.controller_params, cfg.mpc.dt);

    double t_in = cfg.initial_t_in;
    double setpoint = cfg.initial_t_in;
    std::uint64_t mpc_invocation = 0;

    for (long k = 0; k < total_steps; ++k) {
        const TimePoint now =
            cfg.start +
            static_cast<TimePoint>(std::llround(static_cast<double>(k) * cfg.internal_dt *
                                                static_cast<double>(kSecondsPerHour)));
        const std::size_t wi = weather.index_at(now);
        const double t_out_now = weather.t_out[wi];

        if (k % steps_per_mpc == 0) {
            switch (cfg.policy.kind) {
                case PolicyKind::kConstant:
                    setpoint = cfg.policy.constant_setpoint;
                    break;
                case PolicyKind::kSchedule:
                    setpoint = schedule_setpoint(cfg.policy, now);
                    break;
                case PolicyKind::kMpc: {
                    const Forecast fc =
                        make_forecast(weather, now, cfg.mpc.horizon, cfg.forecast_error,
                                      derive_seed(cfg.seed, "forecast", mpc_invocation));
                    ++mpc_invocation;
                    const auto features =
                        disturbance_features(fc.timestamps, fc.t_out, fc.ghi, fc.wind);
                    OcpSpec spec;
                    spec.horizon = cfg.mpc.horizon;
                    spec.dt = cfg.mpc.dt;
                    spec.q_e_hat = predict_disturbance(cfg.disturbance, features);
                    spec.theta_hat.resize(features.size());
                    spec.eta_hat.resize(features.size());
                    spec.price_energy.resize(features.size());
                    spec.t_ref.resize(features.size());
                    spec.price_discomfort.assign(features.size(), 0.0);
                    for (int l = 0; l < cfg.mpc.horizon; ++l) {
                        bool clamped = false;
                        spec.theta_hat[l] =
                            effective_boundary_temperature(cfg.controller_params, fc.t_out[l]);
                        spec.eta_hat[l] = cop(cfg.plant, fc.t_out[l], &clamped);
                        if (clamped) ++trace.cop_clamp_events;
                        const TimePoint at =
                            now + static_cast<TimePoint>(std::llround(
                                      (static_cast<double>(l) + 1.0) * cfg.mpc.dt *
                                      static_cast<double>(kSecondsPerHour)));
                        spec.t_ref[l] = cfg.mpc.reference.value_at(at);
                        spec.price_energy[l] =
                            hourly_value(cfg.mpc.price_energy_by_hour, at, "price_energy");
                        if (cfg.mpc.price_emission > 0.0) {
                            spec.price_emission = cfg.mpc.price_emission;
                            spec.emission_intensity.resize(features.size());
                            spec.emission_intensity[l] = hourly_value(
                                cfg.mpc.emission_intensity_by_hour, at, "emission_intensity");
                        }
                    }
                    spec.comfort_band = cfg.mpc.comfort_band;
                    spec.effective_resistance = controller_model.r;
                    spec.dynamics_a = controller_model.a;
                    spec.p_bar = cfg.plant.p_bar;
                    spec.p_r_bar = cfg.plant.p_r_bar;
                    spec.tracking_tau = cfg.mpc.tracking_tau;
                    spec.setpoint_rate_limit = cfg.mpc.setpoint_rate_limit;
                    spec.previous_setpoint = setpoint;  // the command still in force
                    const MpcStepResult res =
                        mpc_step(t_in, std::move(spec), tuning, cfg.mpc.comfort, now);
                    setpoint = res.setpoint;
                    break;
                }
            }
        }

        const double pi_t_now =
            cfg.policy.kind == PolicyKind::kMpc && tuning.ever_tuned
                ? day_night_modulation(tuning.pi_t_base, hour_of_day_fractional(now), tuning)
                : 0.0;

        if (cfg.defrost_enabled)
            defrost_step(device, t_out_now, weather.rh[wi], defrost_rng, cfg.defrost,
                         cfg.internal_dt);

        bool clamped = false;
        const double eta_now = cop(cfg.plant, t_out_now, &clamped);
        if (clamped) ++trace.cop_clamp_events;
        const DeviceOutput out =
            device_controller_step(device, setpoint, t_in, cfg.plant, eta_now, cfg.internal_dt);

        SimRecord rec;
        rec.time = now;
        rec.t_in = t_in;
        rec.setpoint = setpoint;
        rec.t_out = t_out_now;
        rec.q_c = out.q_c;
        rec.p_hp = out.p_hp;
        rec.p_elem = out.p_elem;
        rec.stage = out.stage;
        rec.defrost = device.defrost;
        rec.ppd_pct = ppd_at(cfg.mpc.comfort, t_in);
        rec.pi_t = pi_t_now;
        trace.records.push_back(rec);

        const double theta_truth =
            effective_boundary_temperature(cfg.truth_params, t_out_now);
        t_in = step(truth_model, StateInput{t_in, theta_truth, out.q_c, q_e_truth[wi]});
    }
    return trace;
}

void save_trace_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "timestamp_iso8601,t_in_c,setpoint_c,q_c_kw,p_hp_kw,p_elem_kw,stage,defrost,ppd_pct,"
           "pi_t\n";
    char buf[256];
    for (const SimRecord& r : trace.records) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%zu,%d,%.6f,%.8f\n",
                      format_iso8601(r.time).c_str(), r.t_in, r.setpoint, r.q_c, r.p_hp,
                      r.p_elem, r.stage, r.defrost ? 1 : 0, r.ppd_pct, r.pi_t);
        out << buf;
    }
}

SimTrace load_trace_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {
        "timestamp_iso8601", "t_in_c", "setpoint_c", "q_c_kw",  "p_hp_kw",
        "p_elem_kw",         "stage",  "defrost",    "ppd_pct", "pi_t"};
    if (table.header != expected)
        throw std::runtime_error(path + ": unexpected trace header");
    SimTrace trace;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        SimRecord r;
        r.time = parse_iso8601(row[0]);
        r.t_in = parse_double_field(row[1], "t_in_c", line);
        r.setpoint = parse_double_field(row[2], "setpoint_c", line);
        r.q_c = parse_double_field(row[3], "q_c_kw", line);
        r.p_hp = parse_double_field(row[4], "p_hp_kw", line);
        r.p_elem = parse_double_field(row[5], "p_elem_kw", line);
        r.stage = static_cast<std::size_t>(parse_double_field(row[6], "stage", line));
        r.defrost = parse_double_field(row[7], "defrost", line) != 0.0;
        r.ppd_pct = parse_double_field(row[8], "ppd_pct", line);
        r.pi_t = parse_double_field(row[9], "pi_t", line);
        r.t_out = std::numeric_limits<double>::quiet_NaN();
        trace.records.push_back(r);
    }
    if (trace.records.size() >= 2)
        trace.dt_hours = static_cast<double>(trace.records[1].time - trace.records[0].time) /
                         static_cast<double>(kSecondsPerHour);
    return trace;
}

void attach_outdoor(SimTrace& trace, const WeatherSeries& weather) {
    for (SimRecord& r : trace.records) r.t_out = weather.t_out[weather.index_at(r.time)];
}

}  // namespace heatctl

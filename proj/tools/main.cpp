#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "heatctl/analysis.hpp"
#include "heatctl/config.hpp"
#include "heatctl/controller.hpp"
#include "heatctl/identification.hpp"
#include "heatctl/simulation.hpp"

namespace fs = std::filesystem;
using namespace heatctl;

namespace {

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

/// Controller disturbance model when no identified model is available:
/// ridge regression trained on the scenario's own exogenous-heat profile.
DisturbanceModel disturbance_from_truth(const RunConfig& cfg, const WeatherSeries& weather) {
    const auto features =
        disturbance_features(weather.timestamps, weather.t_out, weather.ghi, weather.wind);
    const auto targets = truth_exogenous(weather, cfg.truth_profile);
    return train_disturbance_model(features, targets, cfg.ident.disturbance);
}

DisturbanceModel controller_disturbance(RunConfig& cfg, const WeatherSeries& weather) {
    if (cfg.identify_thermal) {
        if (cfg.training_csv.empty())
            throw std::runtime_error("[thermal] identify = true requires [paths] training_csv");
        const TrainingSeries series = load_training_csv(cfg.training_csv);
        const IdentifyResult result = identify(series, cfg.ident);
        cfg.thermal = result.params;
        return result.disturbance;
    }
    return disturbance_from_truth(cfg, weather);
}

std::string daily_csv(const std::vector<DailyRecord>& days, std::size_t num_stages) {
    std::string out = "date,delta_t_c,energy_kwh,element_kwh,element_on_h,peak_kw";
    for (std::size_t s = 1; s <= num_stages; ++s) out += ",events_s" + std::to_string(s);
    out += "\n";
    for (const DailyRecord& d : days) {
        out += format_iso8601(d.date).substr(0, 10);
        out += "," + fmt(d.delta_t, 4) + "," + fmt(d.energy_kwh, 4) + "," +
               fmt(d.element_kwh, 4) + "," + fmt(d.element_on_hours, 4) + "," +
               fmt(d.peak_kw, 4);
        for (std::size_t s = 1; s <= num_stages; ++s) {
            auto it = d.stage_events.find(s);
            out += "," + std::to_string(it == d.stage_events.end() ? 0 : it->second);
        }
        out += "\n";
    }
    return out;
}

std::string describe_stages(const StageStatistics& stats) {
    std::string out;
    out += "turn-on events: " + std::to_string(stats.total_events) + "\n";
    for (const auto& [stage, count] : stats.turn_on_events)
        out += "  stage " + std::to_string(stage) + ": " + std::to_string(count) + "\n";
    if (stats.mean_element_power_on)
        out += "mean element power while on: " + fmt(*stats.mean_element_power_on, 3) + " kW\n";
    else
        out += "mean element power while on: (elements never ran)\n";
    return out;
}

int cmd_identify(RunConfig cfg) {
    if (cfg.training_csv.empty())
        throw std::runtime_error("identify requires [paths] training_csv");
    const TrainingSeries series = load_training_csv(cfg.training_csv);
    const IdentifyResult result = identify(series, cfg.ident);
    fs::create_directories(cfg.output_dir);

    std::string model;
    model += "[thermal]\n";
    model += "r_out = " + fmt(result.params.r_out, 6) + "\n";
    model += "r_m = " + fmt(result.params.r_m, 6) + "\n";
    model += "c = " + fmt(result.params.c, 6) + "\n";
    model += "t_m = " + fmt(result.params.t_m, 6) + "\n";
    write_file(fs::path(cfg.output_dir) / "model.ini", model);

    std::string report;
    report += "r_out = " + fmt(result.outdoor.r_out, 4) + " degC/kW (alpha = " +
              fmt(result.outdoor.alpha, 4) + " degC)\n";
    report += "r_m = " + fmt(result.mass.r_m, 4) + " degC/kW\n";
    report += "a = " + fmt(result.mass.a, 6) + "\n";
    report += "c = " + fmt(result.mass.c, 4) + " kWh/degC\n";
    report += "t_m = " + fmt(result.mass.t_m, 4) + " degC\n";
    report += "validation temperature rmse = " +
              fmt(result.report.rmse_temperature_validation, 4) + " degC\n";
    report += "validation power rmse = " + fmt(result.report.rmse_power_validation, 4) + " kW\n";
    report += "train rows = [" + std::to_string(result.report.train_begin) + ", " +
              std::to_string(result.report.train_end) + ")\n";
    report += "validation rows = [" + std::to_string(result.report.validation_begin) + ", " +
              std::to_string(result.report.validation_end) + ")\n";
    for (const std::string& w : result.disturbance.warnings) report += "warning: " + w + "\n";
    write_file(fs::path(cfg.output_dir) / "fit_report.txt", report);
    std::cout << report;
    return 0;
}

OcpSpec ocp_from_config(const RunConfig& cfg, const WeatherSeries& weather,
                        const DisturbanceModel& disturbance, TimePoint start) {
    const EffectiveModel model = discretize(cfg.thermal, cfg.mpc.dt);
    const Forecast fc = make_forecast(weather, start, cfg.mpc.horizon, cfg.forecast_error,
                                      derive_seed(cfg.seed, "forecast", 0));
    const auto features = disturbance_features(fc.timestamps, fc.t_out, fc.ghi, fc.wind);
    OcpSpec spec;
    spec.horizon = cfg.mpc.horizon;
    spec.dt = cfg.mpc.dt;
    spec.t_init = cfg.initial_t_in;
    spec.q_e_hat = predict_disturbance(disturbance, features);
    const auto L = static_cast<std::size_t>(cfg.mpc.horizon);
    spec.theta_hat.resize(L);
    spec.eta_hat.resize(L);
    spec.price_energy.resize(L);
    spec.t_ref.resize(L);
    spec.price_discomfort.resize(L);
    TuningState tuning = cfg.mpc.tuning;
    for (std::size_t l = 0; l < L; ++l) {
        spec.theta_hat[l] = effective_boundary_temperature(cfg.thermal, fc.t_out[l]);
        spec.eta_hat[l] = cop(cfg.plant, fc.t_out[l]);
        const TimePoint at =
            start + static_cast<TimePoint>((l + 1) * static_cast<std::size_t>(
                                                         cfg.mpc.dt * kSecondsPerHour));
        spec.t_ref[l] = cfg.mpc.reference.value_at(at);
        spec.price_energy[l] = cfg.mpc.price_energy_by_hour.size() == 24
                                   ? cfg.mpc.price_energy_by_hour[static_cast<std::size_t>(
                                         hour_of_day(at))]
                                   : cfg.mpc.price_energy_by_hour.at(0);
        spec.price_discomfort[l] =
            day_night_modulation(tuning.pi_t_base, hour_of_day_fractional(at), tuning);
    }
    spec.comfort_band = cfg.mpc.comfort_band;
    spec.effective_resistance = model.r;
    spec.dynamics_a = model.a;
    spec.p_bar = cfg.plant.p_bar;
    spec.p_r_bar = cfg.plant.p_r_bar;
    spec.price_demand = cfg.mpc.price_demand;
    spec.tracking_tau = cfg.mpc.tracking_tau;
    spec.setpoint_rate_limit = cfg.mpc.setpoint_rate_limit;
    if (cfg.mpc.price_emission > 0.0) {
        spec.price_emission = cfg.mpc.price_emission;
        spec.emission_intensity.resize(L);
        for (std::size_t l = 0; l < L; ++l) {
            const TimePoint at =
                start + static_cast<TimePoint>((l + 1) * static_cast<std::size_t>(
                                                             cfg.mpc.dt * kSecondsPerHour));
            spec.emission_intensity[l] =
                cfg.mpc.emission_intensity_by_hour.size() == 24
                    ? cfg.mpc.emission_intensity_by_hour[static_cast<std::size_t>(
                          hour_of_day(at))]
                    : cfg.mpc.emission_intensity_by_hour.at(0);
        }
    }
    return spec;
}

int cmd_plan(RunConfig cfg, const std::string& start_text) {
    if (cfg.weather_csv.empty()) throw std::runtime_error("plan requires [paths] weather_csv");
    const WeatherSeries weather = load_weather_csv(cfg.weather_csv);
    const DisturbanceModel disturbance = controller_disturbance(cfg, weather);
    const TimePoint start = start_text.empty() ? cfg.scenario_start : parse_iso8601(start_text);
    const OcpSpec spec = ocp_from_config(cfg, weather, disturbance, start);
    const OcpPlan plan = solve_ocp(spec);

    fs::create_directories(cfg.output_dir);
    std::string csv = "step,setpoint_c,q_c_kw,p_kw\n";
    for (int l = 0; l < spec.horizon; ++l)
        csv += std::to_string(l) + "," + fmt(plan.setpoints[l]) + "," +
               fmt(plan.thermal_power[l]) + "," + fmt(plan.electric_power[l]) + "\n";
    write_file(fs::path(cfg.output_dir) / "plan.csv", csv);

    std::cout << "planned peak: " << fmt(plan.peak, 3) << " kW\n"
              << "cost: demand " << fmt(plan.cost.demand, 4) << " + energy "
              << fmt(plan.cost.energy, 4) << " + discomfort " << fmt(plan.cost.discomfort, 4)
              << " + emission " << fmt(plan.cost.emission, 4) << " = "
              << fmt(plan.cost.total(), 4) << " $\n";
    if (plan.comfort_relaxed) std::cout << "note: comfort band relaxed to feasibility\n";
    if (plan.fallback) std::cout << "note: reference-tracking fallback\n";
    return 0;
}

int cmd_simulate(RunConfig cfg) {
    if (cfg.weather_csv.empty()) throw std::runtime_error("simulate requires [paths] weather_csv");
    const WeatherSeries weather = load_weather_csv(cfg.weather_csv);
    const DisturbanceModel disturbance = controller_disturbance(cfg, weather);
    const SimTrace trace =
        run_closed_loop(cfg.scenario(cfg.scenario_policy, disturbance), weather);
    fs::create_directories(cfg.output_dir);
    save_trace_csv(trace, (fs::path(cfg.output_dir) / "trace.csv").string());
    double energy = 0.0;
    for (const SimRecord& r : trace.records) energy += (r.p_hp + r.p_elem) * trace.dt_hours;
    std::cout << "policy " << trace.policy_label << ": " << trace.records.size() << " steps, "
              << fmt(energy, 2) << " kWh HVAC electric energy\n";
    return 0;
}

int cmd_compare(RunConfig cfg) {
    if (cfg.weather_csv.empty()) throw std::runtime_error("compare requires [paths] weather_csv");
    const WeatherSeries weather = load_weather_csv(cfg.weather_csv);
    const DisturbanceModel disturbance = controller_disturbance(cfg, weather);

    const SimTrace trace_mpc =
        run_closed_loop(cfg.scenario(PolicyKind::kMpc, disturbance), weather);
    const SimTrace trace_base =
        run_closed_loop(cfg.scenario(cfg.benchmark_policy.kind, disturbance), weather);

    fs::create_directories(cfg.output_dir);
    save_trace_csv(trace_mpc, (fs::path(cfg.output_dir) / "trace_mpc.csv").string());
    save_trace_csv(trace_base, (fs::path(cfg.output_dir) / "trace_baseline.csv").string());

    const auto days_mpc = daily_aggregate(trace_mpc, IndoorReference::kMeasured);
    const auto days_base = daily_aggregate(trace_base, IndoorReference::kMeasured);
    const std::size_t num_stages = cfg.plant.stages.size();
    write_file(fs::path(cfg.output_dir) / "daily_mpc.csv", daily_csv(days_mpc, num_stages));
    write_file(fs::path(cfg.output_dir) / "daily_baseline.csv",
               daily_csv(days_base, num_stages));

    std::string report;
    double e_mpc = 0.0, e_base = 0.0;
    for (const auto& d : days_mpc) e_mpc += d.energy_kwh;
    for (const auto& d : days_base) e_base += d.energy_kwh;
    report += "total HVAC energy: mpc " + fmt(e_mpc, 2) + " kWh, baseline " + fmt(e_base, 2) +
              " kWh\n";
    try {
        const SlopeEstimate slope_mpc = fit_energy_line(days_mpc, cfg.balance_offset);
        const SlopeEstimate slope_base = fit_energy_line(days_base, cfg.balance_offset);
        report += "slope mpc: " + fmt(slope_mpc.slope, 4) + " +- " +
                  fmt(slope_mpc.slope_std, 4) + " kWh/degC\n";
        report += "slope baseline: " + fmt(slope_base.slope, 4) + " +- " +
                  fmt(slope_base.slope_std, 4) + " kWh/degC\n";
        const SavingsReport savings = relative_savings_mc(
            slope_mpc, slope_base, cfg.mc_samples, derive_seed(cfg.seed, "relsavings"));
        report += "relative savings: mean " + fmt(savings.mean_pct, 2) + "% , 95% CI [" +
                  fmt(savings.lo_pct, 2) + "%, " + fmt(savings.hi_pct, 2) + "%] from " +
                  std::to_string(savings.samples) + " samples\n";
    } catch (const std::exception& ex) {
        report += std::string("slope comparison unavailable: ") + ex.what() + "\n";
    }
    report += "\nmpc stage statistics:\n" + describe_stages(stage_statistics(days_mpc));
    report += "\nbaseline stage statistics:\n" + describe_stages(stage_statistics(days_base));
    write_file(fs::path(cfg.output_dir) / "savings.txt", report);
    std::cout << report;
    return 0;
}

int cmd_tune(RunConfig cfg, const std::string& start_text) {
    if (cfg.weather_csv.empty()) throw std::runtime_error("tune requires [paths] weather_csv");
    const WeatherSeries weather = load_weather_csv(cfg.weather_csv);
    const DisturbanceModel disturbance = controller_disturbance(cfg, weather);
    const TimePoint start = start_text.empty() ? cfg.scenario_start : parse_iso8601(start_text);
    OcpSpec spec = ocp_from_config(cfg, weather, disturbance, start);
    TuningState tuning = cfg.mpc.tuning;
    if (tuning.sweep_grid.empty()) tuning.sweep_grid = default_sweep_grid();
    const TuneResult result = tune_discomfort_price(spec, tuning, cfg.mpc.comfort);

    fs::create_directories(cfg.output_dir);
    std::string csv = "pi_t,planned_avg_ppd_pct\n";
    for (const auto& [candidate, avg] : result.sweep)
        csv += fmt(candidate, 6) + "," + fmt(avg, 4) + "\n";
    write_file(fs::path(cfg.output_dir) / "tuning.csv", csv);
    std::string summary = "selected pi_t = " + fmt(result.pi_t, 6) + " $/degC/h" +
                          (result.ceiling_met ? "" : " (ceiling not met; grid maximum)") + "\n";
    write_file(fs::path(cfg.output_dir) / "tuning.txt", summary);
    std::cout << summary;
    return 0;
}

int cmd_analyze(RunConfig cfg, const std::vector<std::string>& trace_paths) {
    if (trace_paths.empty()) throw std::runtime_error("analyze requires at least one trace CSV");
    if (cfg.weather_csv.empty()) throw std::runtime_error("analyze requires [paths] weather_csv");
    const WeatherSeries weather = load_weather_csv(cfg.weather_csv);
    fs::create_directories(cfg.output_dir);

    std::vector<std::vector<DailyRecord>> all_days;
    std::string report;
    for (const std::string& path : trace_paths) {
        SimTrace trace = load_trace_csv(path);
        attach_outdoor(trace, weather);
        trace.policy_label = fs::path(path).stem().string();
        std::vector<std::string> warnings;
        auto days = daily_aggregate(trace, IndoorReference::kMeasured, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
        write_file(fs::path(cfg.output_dir) / ("daily_" + trace.policy_label + ".csv"),
                   daily_csv(days, cfg.plant.stages.size()));
        report += trace.policy_label + ":\n";
        try {
            const SlopeEstimate slope = fit_energy_line(days, cfg.balance_offset);
            report += "  slope " + fmt(slope.slope, 4) + " +- " + fmt(slope.slope_std, 4) +
                      " kWh/degC (offset " + fmt(slope.offset, 1) + " degC)\n";
        } catch (const std::exception& ex) {
            report += std::string("  slope unavailable: ") + ex.what() + "\n";
        }
        report += describe_stages(stage_statistics(days));
        all_days.push_back(std::move(days));
    }
    if (all_days.size() == 2) {
        try {
            const SlopeEstimate s0 = fit_energy_line(all_days[0], cfg.balance_offset);
            const SlopeEstimate s1 = fit_energy_line(all_days[1], cfg.balance_offset);
            const SavingsReport savings = relative_savings_mc(
                s0, s1, cfg.mc_samples, derive_seed(cfg.seed, "relsavings"));
            report += "relative savings (first vs second): mean " + fmt(savings.mean_pct, 2) +
                      "%, 95% CI [" + fmt(savings.lo_pct, 2) + "%, " + fmt(savings.hi_pct, 2) +
                      "%]\n";
        } catch (const std::exception& ex) {
            report += std::string("savings unavailable: ") + ex.what() + "\n";
        }
    }
    write_file(fs::path(cfg.output_dir) / "analysis.txt", report);
    std::cout << report;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supervisory heating control toolkit: grey-box identification, LP-based "
                 "predictive set-point planning, closed-loop simulation, and savings analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    long seed_override = -1;
    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config file (INI)")->required();
        sub->add_option("--seed", seed_override, "Root seed override");
        sub->add_option("--out", out_override, "Output directory override");
        return sub;
    };

    auto* identify =
        add_globals(app.add_subcommand("identify", "Fit the thermal model from training data"));
    auto* plan = add_globals(app.add_subcommand("plan", "Solve one open-loop plan and export it"));
    std::string plan_start;
    plan->add_option("--start", plan_start, "Plan start instant (ISO 8601)");
    auto* simulate = add_globals(app.add_subcommand("simulate", "Run one closed-loop scenario"));
    auto* compare = add_globals(
        app.add_subcommand("compare", "Run MPC and the benchmark policy on identical inputs"));
    auto* tune =
        add_globals(app.add_subcommand("tune", "Sweep the discomfort price at one instant"));
    std::string tune_start;
    tune->add_option("--start", tune_start, "Tuning instant (ISO 8601)");
    auto* analyze =
        add_globals(app.add_subcommand("analyze", "Aggregate and compare trace CSVs"));
    std::vector<std::string> trace_paths;
    analyze->add_option("traces", trace_paths, "Trace CSV paths");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = RunConfig::load(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (identify->parsed()) return cmd_identify(std::move(cfg));
        if (plan->parsed()) return cmd_plan(std::move(cfg), plan_start);
        if (simulate->parsed()) return cmd_simulate(std::move(cfg));
        if (compare->parsed()) return cmd_compare(std::move(cfg));
        if (tune->parsed()) return cmd_tune(std::move(cfg), tune_start);
        if (analyze->parsed()) return cmd_analyze(std::move(cfg), trace_paths);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}

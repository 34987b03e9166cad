#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heatctl/thermal_model.hpp"
#include "heatctl/timeutil.hpp"

namespace heatctl {

/// Passive observation series used for model training. Sampling must be
/// uniform with no gaps; series with gaps are split upstream.
struct TrainingSeries {
    std::vector<TimePoint> timestamps;
    std::vector<double> t_in;   // degC
    std::vector<double> t_out;  // degC
    std::vector<double> q_c;    // HVAC thermal power, kW
    std::vector<double> ghi;    // global solar irradiance, W/m2
    std::vector<double> wind;   // m/s
    std::vector<double> rh;     // %, optional context column

    std::size_t size() const { return timestamps.size(); }
    double dt_hours() const;
    void validate() const;
};

/// CSV schema (same conventions as the weather file):
/// timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct,t_in_c,q_c_kw
TrainingSeries load_training_csv(const std::string& path);

struct SteadyWindowCriteria {
    double max_temp_drift = 0.1;  // degC/h
    int window_hours = 3;
    int night_start = 23;  // hour of day, inclusive
    int night_end = 6;     // exclusive; wraps past midnight when start > end
};

/// Time-average indoor temperature; the deep-mass temperature estimate.
double estimate_mass_temperature(const TrainingSeries& s);

/// Indices k in night hours where the indoor temperature drifts by at most
/// max_temp_drift * j over every look-ahead j = 1..window_hours.
std::vector<std::size_t> detect_steady_windows(const TrainingSeries& s,
                                               const SteadyWindowCriteria& c);

struct OutdoorFit {
    double alpha;  // intercept, degC (~ r_out * q_e)
    double r_out;  // degC/kW
};

/// Least squares of T - T_out on (1, q_c) over the steady indices.
/// Throws when fewer than two points or q_c is constant (unidentifiable).
OutdoorFit fit_outdoor_resistance(const TrainingSeries& s,
                                  const std::vector<std::size_t>& steady);

struct MassFitCandidate {
    double r_m = 0.0;
    double a = 0.0;
    double beta = 0.0;
    double validation_rmse = 0.0;  // degC, one-step-ahead
    bool stable = false;           // a in (0, 1)
};

struct MassFit {
    double r_m = 0.0;
    double a = 0.0;
    double c = 0.0;  // kWh/degC, recovered as -dt / (R ln a)
    double beta = 0.0;
    double t_m = 0.0;
    std::vector<MassFitCandidate> candidates;
};

/// Grid search over r_m candidates: each defines theta and R, an AR(1)
/// least-squares fit gives (beta, a), and a chronological 2/3-1/3 split
/// scores one-step-ahead temperature RMSE. Returns the best stable
/// candidate; throws "no stable fit" when every candidate has a outside
/// (0, 1).
MassFit fit_mass_params(const TrainingSeries& s, double r_out,
                        const std::vector<double>& grid);

/// 200 log-spaced candidates over [0.01, 10] degC/kW.
std::vector<double> default_r_m_grid();

/// Inverts the discrete dynamics for the exogenous power target sequence
/// (length size()-1):
/// q_e(k) = ((T(k+1) - a T(k)) / (1-a) - theta(k)) / R - q_c(k).
std::vector<double> invert_exogenous(const TrainingSeries& s, const ThermalParams& p,
                                     const EffectiveModel& m);

struct DisturbanceHyperparams {
    enum class Kind { kRidge, kKernel };
    Kind kind = Kind::kRidge;
    std::vector<double> penalties = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};  // 2-fold CV picks one
    double kernel_gamma = 0.3;  // RBF width on normalized features
};

/// Weather + calendar regressor for the exogenous thermal power. Features
/// are z-scored with training statistics; zero-variance features are
/// dropped with a warning.
struct DisturbanceModel {
    DisturbanceHyperparams::Kind kind = DisturbanceHyperparams::Kind::kRidge;
    std::vector<double> feature_mean, feature_scale;
    std::vector<bool> active;
    double target_mean = 0.0;
    double penalty = 0.0;
    // ridge
    std::vector<double> weights;  // one per active feature
    // kernel
    double gamma = 0.0;
    std::vector<std::vector<double>> support;  // normalized active features
    std::vector<double> alpha;
    std::vector<std::string> warnings;

    std::size_t num_features() const { return feature_mean.size(); }
};

/// Feature layout: t_out, ghi, wind, sin(hour), cos(hour), day-of-week
/// one-hot (7 columns) = 12 features per sample.
std::vector<std::vector<double>> disturbance_features(const std::vector<TimePoint>& timestamps,
                                                      const std::vector<double>& t_out,
                                                      const std::vector<double>& ghi,
                                                      const std::vector<double>& wind);

DisturbanceModel train_disturbance_model(const std::vector<std::vector<double>>& features,
                                         const std::vector<double>& targets,
                                         const DisturbanceHyperparams& hp);

std::vector<double> predict_disturbance(const DisturbanceModel& d,
                                        const std::vector<std::vector<double>>& features);

struct FitReport {
    ThermalParams params{};
    double a = 0.0;
    double rmse_temperature_validation = 0.0;  // degC
    double rmse_power_validation = 0.0;        // kW
    std::size_t train_begin = 0, train_end = 0;
    std::size_t validation_begin = 0, validation_end = 0;
};

/// One-step-ahead temperature RMSE (dynamics with predicted q_e) and
/// thermal-power RMSE (dynamics solved for q_c given measured
/// temperatures) over a disjoint holdout.
FitReport validate_model(const ThermalParams& p, const EffectiveModel& m,
                         const DisturbanceModel& d, const TrainingSeries& holdout);

struct IdentifyOptions {
    SteadyWindowCriteria steady;
    std::vector<double> r_m_grid;  // empty = default_r_m_grid()
    DisturbanceHyperparams disturbance;
    double validation_fraction = 1.0 / 3.0;  // chronological tail
};

struct IdentifyResult {
    ThermalParams params{};
    EffectiveModel model{};
    DisturbanceModel disturbance;
    OutdoorFit outdoor{};
    MassFit mass;
    FitReport report;
};

/// Full training pipeline on the leading (1 - validation_fraction) of the
/// series, validated on the chronological tail.
IdentifyResult identify(const TrainingSeries& series, const IdentifyOptions& options);

}  // namespace heatctl

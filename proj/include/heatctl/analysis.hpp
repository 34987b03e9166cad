#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatctl/simulation.hpp"

namespace heatctl {

enum class IndoorReference { kMeasured, kSetpoint };

struct DailyRecord {
    TimePoint date = 0;        // midnight of the day
    double delta_t = 0.0;      // mean indoor-outdoor difference, degC
    double energy_kwh = 0.0;   // total HVAC electric energy
    double element_kwh = 0.0;  // element share of energy_kwh
    double element_on_hours = 0.0;
    double peak_kw = 0.0;
    std::map<std::size_t, int> stage_events;  // turn-on events by peak stage reached
    std::string policy;
};

/// Per-day sums and means over whole days; a partial trailing day is
/// dropped (warning appended when a sink is provided). A stage turn-on
/// event is a rising edge of element power; the event's stage is the
/// highest stage reached during the contiguous on-run.
std::vector<DailyRecord> daily_aggregate(const SimTrace& trace, IndoorReference ref,
                                         std::vector<std::string>* warnings = nullptr);

struct SlopeEstimate {
    double slope = 0.0;      // kWh/degC
    double slope_std = 0.0;  // kWh/degC
    double offset = 8.0;     // degC balance-point offset used in the fit
};

/// Through-origin least squares of daily energy on (delta_t - offset),
/// restricted to heating-regime days (delta_t > offset). Requires at least
/// three such days.
SlopeEstimate fit_energy_line(const std::vector<DailyRecord>& records, double offset_c = 8.0);

struct SavingsReport {
    double mean_pct = 0.0;
    double lo_pct = 0.0;  // 2.5 percentile
    double hi_pct = 0.0;  // 97.5 percentile
    std::size_t samples = 0;
};

/// Samples both slopes from their normal distributions and reports the
/// distribution of 1 - m / m_tilde. Draws with a non-positive baseline
/// slope are rejected and resampled.
SavingsReport relative_savings_mc(const SlopeEstimate& mpc, const SlopeEstimate& baseline,
                                  std::size_t n, std::uint64_t seed);

struct NormalDist {
    double mean = 0.0;
    double sd = 0.0;
};

/// Normal prior from a symmetric central confidence interval.
NormalDist normal_from_ci(double lo, double hi, double coverage = 0.99);

struct SeasonalSavings {
    double mean_usd = 0.0;
    double lo_usd = 0.0;
    double hi_usd = 0.0;
    double baseline_mean_usd = 0.0;
    double relative_mean_pct = 0.0;
    double relative_lo_pct = 0.0;
    double relative_hi_pct = 0.0;
    std::size_t samples = 0;
};

/// Season-long cost savings: per draw samples (m, m_tilde, gamma), models
/// daily energies as slope * max{0, t_ref - [gamma] - theta_bar - offset},
/// and prices the difference.
SeasonalSavings seasonal_savings_mc(const std::vector<double>& daily_mean_t_out, double t_ref,
                                    NormalDist gamma, NormalDist m, NormalDist m_tilde,
                                    double price_energy, std::size_t n, std::uint64_t seed,
                                    double balance_offset = 8.0);

struct StageStatistics {
    std::map<std::size_t, int> turn_on_events;
    int total_events = 0;
    std::optional<double> mean_element_power_on;  // kW, given elements running
};

StageStatistics stage_statistics(const std::vector<DailyRecord>& records);

}  // namespace heatctl

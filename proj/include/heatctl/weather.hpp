#pragma once

#include <string>
#include <vector>

#include "heatctl/timeutil.hpp"

namespace heatctl {

/// Uniformly sampled weather context. Timestamps must be strictly
/// increasing with a constant interval.
struct WeatherSeries {
    std::vector<TimePoint> timestamps;
    std::vector<double> t_out;  // degC
    std::vector<double> ghi;    // W/m2
    std::vector<double> wind;   // m/s
    std::vector<double> rh;     // %

    std::size_t size() const { return timestamps.size(); }
    double dt_hours() const;
    void validate() const;

    /// Index of the sample whose interval contains t (zero-order hold).
    /// Throws when t falls outside coverage.
    std::size_t index_at(TimePoint t) const;
};

/// CSV schema (header exactly): timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct
WeatherSeries load_weather_csv(const std::string& path);
void save_weather_csv(const WeatherSeries& w, const std::string& path);

}  // namespace heatctl

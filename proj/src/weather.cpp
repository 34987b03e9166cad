#include "heatctl/weather.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "heatctl/csv.hpp"

namespace heatctl {

double WeatherSeries::dt_hours() const {
    if (timestamps.size() < 2)
        throw std::runtime_error("WeatherSeries: need at least two samples for dt");
    return static_cast<double>(timestamps[1] - timestamps[0]) /
           static_cast<double>(kSecondsPerHour);
}

void WeatherSeries::validate() const {
    const std::size_t n = timestamps.size();
    if (t_out.size() != n || ghi.size() != n || wind.size() != n || rh.size() != n)
        throw std::runtime_error("WeatherSeries: column lengths differ");
    if (n >= 2) {
        const TimePoint step = timestamps[1] - timestamps[0];
        if (step <= 0) throw std::runtime_error("WeatherSeries: non-uniform timestamps");
        for (std::size_t i = 1; i < n; ++i)
            if (timestamps[i] - timestamps[i - 1] != step)
                throw std::runtime_error("WeatherSeries: non-uniform timestamps");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (rh[i] < 0.0 || rh[i] > 100.0)
            throw std::runtime_error("WeatherSeries: relative humidity outside [0, 100] at row " +
                                     std::to_string(i + 1));
        if (ghi[i] < 0.0)
            throw std::runtime_error("WeatherSeries: negative irradiance at row " +
                                     std::to_string(i + 1));
    }
}

std::size_t WeatherSeries::index_at(TimePoint t) const {
    if (timestamps.empty()) throw std::runtime_error("WeatherSeries: empty series");
    const TimePoint step = timestamps.size() >= 2 ? timestamps[1] - timestamps[0] : kSecondsPerHour;
    if (t < timestamps.front() || t >= timestamps.back() + step)
        throw std::runtime_error("WeatherSeries: time " + format_iso8601(t) +
                                 " outside weather coverage");
    return static_cast<std::size_t>((t - timestamps.front()) / step);
}

WeatherSeries load_weather_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"timestamp_iso8601", "t_out_c", "ghi_wm2",
                                               "wind_ms", "rh_pct"};
    if (table.header != expected)
        throw std::runtime_error(
            path + ": weather header must be exactly timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct");
    WeatherSeries w;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        w.timestamps.push_back(parse_iso8601(row[0]));
        w.t_out.push_back(parse_double_field(row[1], "t_out_c", line));
        w.ghi.push_back(parse_double_field(row[2], "ghi_wm2", line));
        w.wind.push_back(parse_double_field(row[3], "wind_ms", line));
        const double rh = parse_double_field(row[4], "rh_pct", line);
        if (rh < 0.0 || rh > 100.0)
            throw std::runtime_error(path + ": line " + std::to_string(line) +
                                     ": rh_pct outside [0, 100]");
        w.rh.push_back(rh);
    }
    // distinguish duplicated/non-uniform stamps with a parse-level message
    for (std::size_t i = 1; i < w.timestamps.size(); ++i)
        if (w.timestamps[i] <= w.timestamps[i - 1])
            throw std::runtime_error(path + ": line " + std::to_string(table.line_numbers[i]) +
                                     ": non-uniform timestamps");
    w.validate();
    return w;
}

void save_weather_csv(const WeatherSeries& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct\n";
    char buf[160];
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%.6g,%.6g\n",
                      format_iso8601(w.timestamps[i]).c_str(), w.t_out[i], w.ghi[i], w.wind[i],
                      w.rh[i]);
        out << buf;
    }
}

}  // namespace heatctl

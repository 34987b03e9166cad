#pragma once

#include <cstdint>
#include <string>

namespace heatctl {

/// Civil timestamps carried as seconds since 1970-01-01T00:00:00.
/// No time zone handling: timestamps are taken at face value (local time).
using TimePoint = std::int64_t;

constexpr TimePoint kSecondsPerHour = 3600;
constexpr TimePoint kSecondsPerDay = 86400;

/// Parses "YYYY-MM-DDTHH:MM:SS" (optional trailing 'Z', optional " " separator).
/// Throws std::invalid_argument on malformed input.
TimePoint parse_iso8601(const std::string& text);

std::string format_iso8601(TimePoint t);

/// Hour of day in [0, 24).
int hour_of_day(TimePoint t);
double hour_of_day_fractional(TimePoint t);

/// 0 = Monday ... 6 = Sunday.
int day_of_week(TimePoint t);

/// Midnight of the civil day containing t.
TimePoint start_of_day(TimePoint t);

}  // namespace heatctl

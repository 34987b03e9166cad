#include "heatctl/timeutil.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace heatctl {

namespace {

// Days-from-civil algorithm (proleptic Gregorian), valid over the full
// int64 range we care about.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t positive_mod(std::int64_t a, std::int64_t b) {
    std::int64_t r = a % b;
    return r < 0 ? r + b : r;
}

}  // namespace

TimePoint parse_iso8601(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    const int got = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d%n", &y, &mo, &d, &sep,
                                &h, &mi, &s, &consumed);
    if (got < 7 || (sep != 'T' && sep != ' '))
        throw std::invalid_argument("malformed timestamp: '" + text + "'");
    std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest != "Z")
        throw std::invalid_argument("malformed timestamp: '" + text + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60)
        throw std::invalid_argument("timestamp fields out of range: '" + text + "'");
    return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(TimePoint t) {
    const std::int64_t days = floor_div(t, kSecondsPerDay);
    const std::int64_t sod = positive_mod(t, kSecondsPerDay);
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", y, m, d,
                  static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

int hour_of_day(TimePoint t) {
    return static_cast<int>(positive_mod(t, kSecondsPerDay) / 3600);
}

double hour_of_day_fractional(TimePoint t) {
    return static_cast<double>(positive_mod(t, kSecondsPerDay)) / 3600.0;
}

int day_of_week(TimePoint t) {
    // 1970-01-01 was a Thursday.
    return static_cast<int>(positive_mod(floor_div(t, kSecondsPerDay) + 3, 7));
}

TimePoint start_of_day(TimePoint t) {
    return floor_div(t, kSecondsPerDay) * kSecondsPerDay;
}

}  // namespace heatctl

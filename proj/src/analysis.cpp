#include "heatctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatctl {

std::vector<DailyRecord> daily_aggregate(const SimTrace& trace, IndoorReference ref,
                                         std::vector<std::string>* warnings) {
    if (trace.records.empty()) return {};
    const double dt = trace.dt_hours;
    const auto steps_per_day = static_cast<std::size_t>(std::llround(24.0 / dt));
    if (steps_per_day == 0 || std::abs(steps_per_day * dt - 24.0) > 1e-9)
        throw std::invalid_argument("daily_aggregate: step does not divide a day");

    std::vector<DailyRecord> days;
    const std::size_t whole_days = trace.records.size() / steps_per_day;
    if (whole_days * steps_per_day != trace.records.size() && warnings)
        warnings->push_back("partial trailing day dropped");

    bool prev_on = false;
    std::size_t run_peak_stage = 0;
    std::size_t run_day = 0;

    for (std::size_t d = 0; d < whole_days; ++d) {
        DailyRecord rec;
        rec.date = start_of_day(trace.records[d * steps_per_day].time);
        rec.policy = trace.policy_label;
        double sum_dt = 0.0;
        for (std::size_t k = 0; k < steps_per_day; ++k) {
            const SimRecord& r = trace.records[d * steps_per_day + k];
            const double indoor = ref == IndoorReference::kMeasured ? r.t_in : r.setpoint;
            if (std::isnan(r.t_out))
                throw std::runtime_error(
                    "daily_aggregate: outdoor temperature missing; attach_outdoor first");
            sum_dt += indoor - r.t_out;
            const double p_total = r.p_hp + r.p_elem;
            rec.energy_kwh += p_total * dt;
            rec.element_kwh += r.p_elem * dt;
            if (r.p_elem > 0.0) rec.element_on_hours += dt;
            rec.peak_kw = std::max(rec.peak_kw, p_total);

            const bool on = r.p_elem > 0.0;
            if (on && !prev_on) {  // rising edge starts an event on this day
                run_day = d;
                run_peak_stage = r.stage;
            } else if (on) {
                run_peak_stage = std::max(run_peak_stage, r.stage);
            }
            if (!on && prev_on) {
                if (run_day == d)
                    ++rec.stage_events[run_peak_stage];
                else
                    ++days[run_day].stage_events[run_peak_stage];
            }
            prev_on = on;
        }
        rec.delta_t = sum_dt / static_cast<double>(steps_per_day);
        days.push_back(std::move(rec));
    }
    // an event still running at the end of the aggregated span counts too
    if (prev_on && !days.empty()) {
        if (run_day < days.size())
            ++days[run_day].stage_events[run_peak_stage];
    }
    return days;
}

SlopeEstimate fit_energy_line(const std::vector<DailyRecord>& records, double offset_c) {
    std::vector<double> x, y;
    for (const DailyRecord& r : records) {
        if (r.delta_t > offset_c) {
            x.push_back(r.delta_t - offset_c);
            y.push_back(r.energy_kwh);
        }
    }
    if (x.size() < 3) throw std::runtime_error("no heating-regime data");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    SlopeEstimate est;
    est.offset = offset_c;
    est.slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - est.slope * x[i];
        ss_res += r * r;
    }
    const double dof = static_cast<double>(x.size()) - 1.0;
    est.slope_std = std::sqrt(ss_res / dof / sxx);
    return est;
}

namespace {

struct Percentiles {
    double mean, p025, p975;
};

Percentiles summarize(std::vector<double>& samples) {
    // extended precision keeps the point-mass case exact: n identical
    // values sum without rounding and divide back to the value itself
    long double sum = 0.0L;
    for (double v : samples) sum += v;
    const auto n = samples.size();
    auto lo_it = samples.begin() + static_cast<std::ptrdiff_t>(0.025 * static_cast<double>(n));
    std::nth_element(samples.begin(), lo_it, samples.end());
    const double lo = *lo_it;
    auto hi_it = samples.begin() + static_cast<std::ptrdiff_t>(0.975 * static_cast<double>(n));
    std::nth_element(samples.begin(), hi_it, samples.end());
    const double hi = *hi_it;
    return {static_cast<double>(sum / static_cast<long double>(n)), lo, hi};
}

constexpr std::size_t kChunk = 65536;

}  // namespace

SavingsReport relative_savings_mc(const SlopeEstimate& mpc, const SlopeEstimate& baseline,
                                  std::size_t n, std::uint64_t seed) {
    if (n < 10000)
        throw std::invalid_argument("relative_savings_mc: need at least 10^4 samples");
    std::vector<double> samples;
    samples.reserve(n);
    // chunked streams: the concatenation is deterministic and chunks could
    // be drawn in parallel
    for (std::size_t chunk = 0; samples.size() < n; ++chunk) {
        Rng rng(derive_seed(seed, "savings", chunk));
        const std::size_t want = std::min(kChunk, n - samples.size());
        for (std::size_t i = 0; i < want; ++i) {
            const double m = rng.normal(mpc.slope, mpc.slope_std);
            double mt = rng.normal(baseline.slope, baseline.slope_std);
            while (mt <= 0.0) mt = rng.normal(baseline.slope, baseline.slope_std);
            samples.push_back(1.0 - m / mt);
        }
    }
    const Percentiles p = summarize(samples);
    return SavingsReport{p.mean * 100.0, p.p025 * 100.0, p.p975 * 100.0, n};
}

NormalDist normal_from_ci(double lo, double hi, double coverage) {
    if (!(hi > lo)) throw std::invalid_argument("normal_from_ci: empty interval");
    // two-sided central interval: hi - lo = 2 z sd
    double z;
    if (std::abs(coverage - 0.99) < 1e-12)
        z = 2.5758293035489004;
    else if (std::abs(coverage - 0.95) < 1e-12)
        z = 1.959963984540054;
    else
        throw std::invalid_argument("normal_from_ci: unsupported coverage");
    return NormalDist{0.5 * (lo + hi), (hi - lo) / (2.0 * z)};
}

SeasonalSavings seasonal_savings_mc(const std::vector<double>& daily_mean_t_out, double t_ref,
                                    NormalDist gamma, NormalDist m, NormalDist m_tilde,
                                    double price_energy, std::size_t n, std::uint64_t seed,
                                    double balance_offset) {
    if (daily_mean_t_out.empty())
        throw std::invalid_argument("seasonal_savings_mc: need at least one day");
    if (n == 0) throw std::invalid_argument("seasonal_savings_mc: need at least one sample");
    std::vector<double> savings, relative;
    savings.reserve(n);
    relative.reserve(n);
    long double baseline_sum = 0.0L;
    for (std::size_t chunk = 0; savings.size() < n; ++chunk) {
        Rng rng(derive_seed(seed, "seasonal", chunk));
        const std::size_t want = std::min(kChunk, n - savings.size());
        for (std::size_t i = 0; i < want; ++i) {
            const double ms = m.sd > 0.0 ? rng.normal(m.mean, m.sd) : m.mean;
            double mts = m_tilde.sd > 0.0 ? rng.normal(m_tilde.mean, m_tilde.sd) : m_tilde.mean;
            while (mts <= 0.0) mts = rng.normal(m_tilde.mean, m_tilde.sd);
            const double g = gamma.sd > 0.0 ? rng.normal(gamma.mean, gamma.sd) : gamma.mean;
            double base_kwh = 0.0, mpc_kwh = 0.0;
            for (double theta_bar : daily_mean_t_out) {
                base_kwh += mts * std::max(0.0, t_ref - theta_bar - balance_offset);
                mpc_kwh += ms * std::max(0.0, t_ref - g - theta_bar - balance_offset);
            }
            const double base_usd = price_energy * base_kwh;
            const double saved_usd = price_energy * (base_kwh - mpc_kwh);
            baseline_sum += base_usd;
            savings.push_back(saved_usd);
            relative.push_back(base_usd > 0.0 ? saved_usd / base_usd : 0.0);
        }
    }
    const Percentiles ps = summarize(savings);
    const Percentiles pr = summarize(relative);
    SeasonalSavings out;
    out.mean_usd = ps.mean;
    out.lo_usd = ps.p025;
    out.hi_usd = ps.p975;
    out.baseline_mean_usd =
        static_cast<double>(baseline_sum / static_cast<long double>(n));
    out.relative_mean_pct = pr.mean * 100.0;
    out.relative_lo_pct = pr.p025 * 100.0;
    out.relative_hi_pct = pr.p975 * 100.0;
    out.samples = n;
    return out;
}

StageStatistics stage_statistics(const std::vector<DailyRecord>& records) {
    if (records.empty()) throw std::invalid_argument("stage_statistics: no records");
    StageStatistics stats;
    double element_kwh = 0.0, element_hours = 0.0;
    for (const DailyRecord& r : records) {
        for (const auto& [stage, count] : r.stage_events) {
            stats.turn_on_events[stage] += count;
            stats.total_events += count;
        }
        element_kwh += r.element_kwh;
        element_hours += r.element_on_hours;
    }
    if (element_hours > 0.0) stats.mean_element_power_on = element_kwh / element_hours;
    return stats;
}

}  // namespace heatctl

#include "heatctl/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "heatctl/csv.hpp"

namespace heatctl {

namespace {

// Gaussian elimination with partial pivoting; A is overwritten.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[best][c])) best = r;
        if (std::abs(a[best][c]) < 1e-12)
            throw std::runtime_error("singular linear system in regression");
        std::swap(a[c], a[best]);
        std::swap(b[c], b[best]);
        const double inv = 1.0 / a[c][c];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double factor = a[r][c] * inv;
            if (factor == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
            b[r] -= factor * b[c];
        }
    }
    for (std::size_t c = 0; c < n; ++c) b[c] /= a[c][c];
    return b;
}

double rmse(const std::vector<double>& err) {
    if (err.empty()) return 0.0;
    double ss = 0.0;
    for (double e : err) ss += e * e;
    return std::sqrt(ss / static_cast<double>(err.size()));
}

constexpr double kHuge = std::numeric_limits<double>::infinity();

}  // namespace

double TrainingSeries::dt_hours() const {
    if (timestamps.size() < 2)
        throw std::runtime_error("TrainingSeries: need at least two samples for dt");
    return static_cast<double>(timestamps[1] - timestamps[0]) /
           static_cast<double>(kSecondsPerHour);
}

void TrainingSeries::validate() const {
    const std::size_t n = timestamps.size();
    if (t_in.size() != n || t_out.size() != n || q_c.size() != n || ghi.size() != n ||
        wind.size() != n || (!rh.empty() && rh.size() != n))
        throw std::runtime_error("TrainingSeries: column lengths differ");
    if (n >= 2) {
        const TimePoint step = timestamps[1] - timestamps[0];
        if (step <= 0) throw std::runtime_error("TrainingSeries: non-increasing timestamps");
        for (std::size_t i = 2; i < n; ++i)
            if (timestamps[i] - timestamps[i - 1] != step)
                throw std::runtime_error("TrainingSeries: non-uniform timestamps");
    }
    for (double v : q_c)
        if (v < 0.0) throw std::runtime_error("TrainingSeries: negative HVAC power");
}

TrainingSeries load_training_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"timestamp_iso8601", "t_out_c", "ghi_wm2",
                                               "wind_ms",           "rh_pct",  "t_in_c",
                                               "q_c_kw"};
    if (table.header != expected)
        throw std::runtime_error(path + ": training header must be exactly "
                                        "timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct,"
                                        "t_in_c,q_c_kw");
    TrainingSeries s;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        s.timestamps.push_back(parse_iso8601(row[0]));
        s.t_out.push_back(parse_double_field(row[1], "t_out_c", line));
        s.ghi.push_back(parse_double_field(row[2], "ghi_wm2", line));
        s.wind.push_back(parse_double_field(row[3], "wind_ms", line));
        s.rh.push_back(parse_double_field(row[4], "rh_pct", line));
        s.t_in.push_back(parse_double_field(row[5], "t_in_c", line));
        s.q_c.push_back(parse_double_field(row[6], "q_c_kw", line));
    }
    s.validate();
    return s;
}

double estimate_mass_temperature(const TrainingSeries& s) {
    if (s.size() == 0) throw std::runtime_error("empty training series");
    return std::accumulate(s.t_in.begin(), s.t_in.end(), 0.0) /
           static_cast<double>(s.size());
}

std::vector<std::size_t> detect_steady_windows(const TrainingSeries& s,
                                               const SteadyWindowCriteria& c) {
    std::vector<std::size_t> indices;
    const std::size_t n = s.size();
    if (n == 0) return indices;
    const double dt = n >= 2 ? s.dt_hours() : 1.0;
    const auto window = static_cast<std::size_t>(c.window_hours);
    for (std::size_t k = 0; k + window < n; ++k) {
        const int hour = hour_of_day(s.timestamps[k]);
        const bool night = c.night_start <= c.night_end
                               ? (hour >= c.night_start && hour < c.night_end)
                               : (hour >= c.night_start || hour < c.night_end);
        if (!night) continue;
        bool steady = true;
        for (std::size_t j = 1; j <= window && steady; ++j)
            if (std::abs(s.t_in[k + j] - s.t_in[k]) >
                c.max_temp_drift * static_cast<double>(j) * dt)
                steady = false;
        if (steady) indices.push_back(k);
    }
    return indices;
}

OutdoorFit fit_outdoor_resistance(const TrainingSeries& s,
                                  const std::vector<std::size_t>& steady) {
    if (steady.size() < 2)
        throw std::runtime_error("fit_outdoor_resistance: need at least two steady points");
    double sq = 0.0, sqq = 0.0, sy = 0.0, sqy = 0.0;
    const double n = static_cast<double>(steady.size());
    for (std::size_t k : steady) {
        const double q = s.q_c[k];
        const double y = s.t_in[k] - s.t_out[k];
        sq += q;
        sqq += q * q;
        sy += y;
        sqy += q * y;
    }
    const double det = n * sqq - sq * sq;
    const double qvar = sqq / n - (sq / n) * (sq / n);
    if (qvar < 1e-12 || std::abs(det) < 1e-12)
        throw std::runtime_error("unidentifiable R_out: constant HVAC power in steady windows");
    OutdoorFit fit;
    fit.alpha = (sqq * sy - sq * sqy) / det;
    fit.r_out = (n * sqy - sq * sy) / det;
    return fit;
}

std::vector<double> default_r_m_grid() {
    std::vector<double> grid;
    const double lo = 0.01, hi = 10.0;
    const int count = 200;
    for (int i = 0; i < count; ++i)
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return grid;
}

MassFit fit_mass_params(const TrainingSeries& s, double r_out,
                        const std::vector<double>& grid) {
    if (grid.empty()) throw std::runtime_error("fit_mass_params: empty candidate grid");
    if (s.size() < 4) throw std::runtime_error("fit_mass_params: series too short");
    const double dt = s.dt_hours();
    const double t_m = estimate_mass_temperature(s);
    const std::size_t pairs = s.size() - 1;
    const std::size_t train_pairs = std::max<std::size_t>(2, (pairs * 2) / 3);

    MassFit best;
    double best_score = kHuge;
    for (double r_m : grid) {
        if (!(r_m > 0.0)) throw std::runtime_error("fit_mass_params: candidates must be > 0");
        const double r = r_m * r_out / (r_m + r_out);
        MassFitCandidate cand;
        cand.r_m = r_m;
        // AR(1) on x(k) = T(k) - theta(k) - R q_c(k), y(k) = T(k+1) - theta(k) - R q_c(k)
        double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < train_pairs; ++k) {
            const double theta = (r_out * t_m + r_m * s.t_out[k]) / (r_m + r_out);
            const double z = theta + r * s.q_c[k];
            const double x = s.t_in[k] - z;
            const double y = s.t_in[k + 1] - z;
            sx += x;
            sxx += x * x;
            sy += y;
            sxy += x * y;
        }
        const double n = static_cast<double>(train_pairs);
        const double det = n * sxx - sx * sx;
        if (std::abs(det) < 1e-12) continue;  // regressor constant; unidentifiable candidate
        cand.a = (n * sxy - sx * sy) / det;
        cand.beta = (sxx * sy - sx * sxy) / det;
        cand.stable = cand.a > 0.0 && cand.a < 1.0;
        std::vector<double> err;
        for (std::size_t k = train_pairs; k < pairs; ++k) {
            const double theta = (r_out * t_m + r_m * s.t_out[k]) / (r_m + r_out);
            const double z = theta + r * s.q_c[k];
            const double pred = z + cand.beta + cand.a * (s.t_in[k] - z);
            err.push_back(pred - s.t_in[k + 1]);
        }
        cand.validation_rmse = rmse(err);
        best.candidates.push_back(cand);
        if (cand.stable && cand.validation_rmse < best_score) {
            best_score = cand.validation_rmse;
            best.r_m = r_m;
            best.a = cand.a;
            best.beta = cand.beta;
        }
    }
    if (!(best_score < kHuge)) throw std::runtime_error("no stable fit");
    const double r = best.r_m * r_out / (best.r_m + r_out);
    best.c = -dt / (r * std::log(best.a));
    best.t_m = t_m;
    return best;
}

std::vector<double> invert_exogenous(const TrainingSeries& s, const ThermalParams& p,
                                     const EffectiveModel& m) {
    if (s.size() < 2) throw std::runtime_error("invert_exogenous: need consecutive samples");
    std::vector<double> q_e(s.size() - 1);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double theta = effective_boundary_temperature(p, s.t_out[k]);
        q_e[k] = ((s.t_in[k + 1] - m.a * s.t_in[k]) / (1.0 - m.a) - theta) / m.r - s.q_c[k];
    }
    return q_e;
}

std::vector<std::vector<double>> disturbance_features(const std::vector<TimePoint>& timestamps,
                                                      const std::vector<double>& t_out,
                                                      const std::vector<double>& ghi,
                                                      const std::vector<double>& wind) {
    const std::size_t n = timestamps.size();
    if (t_out.size() != n || ghi.size() != n || wind.size() != n)
        throw std::invalid_argument("disturbance_features: column lengths differ");
    std::vector<std::vector<double>> features(n, std::vector<double>(12, 0.0));
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < n; ++i) {
        auto& f = features[i];
        f[0] = t_out[i];
        f[1] = ghi[i];
        f[2] = wind[i];
        const double h = hour_of_day_fractional(timestamps[i]);
        f[3] = std::sin(two_pi * h / 24.0);
        f[4] = std::cos(two_pi * h / 24.0);
        f[5 + day_of_week(timestamps[i])] = 1.0;
    }
    return features;
}

namespace {

struct Normalized {
    std::vector<std::vector<double>> z;  // active features only
    std::vector<double> mean, scale;
    std::vector<bool> active;
};

Normalized normalize(const std::vector<std::vector<double>>& features) {
    const std::size_t n = features.size();
    const std::size_t f = features.front().size();
    Normalized out;
    out.mean.assign(f, 0.0);
    out.scale.assign(f, 1.0);
    out.active.assign(f, true);
    for (std::size_t j = 0; j < f; ++j) {
        double m = 0.0;
        for (const auto& row : features) m += row[j];
        m /= static_cast<double>(n);
        double v = 0.0;
        for (const auto& row : features) v += (row[j] - m) * (row[j] - m);
        v /= static_cast<double>(n);
        out.mean[j] = m;
        if (v < 1e-12) {
            out.active[j] = false;
        } else {
            out.scale[j] = std::sqrt(v);
        }
    }
    for (const auto& row : features) {
        std::vector<double> z;
        for (std::size_t j = 0; j < f; ++j)
            if (out.active[j]) z.push_back((row[j] - out.mean[j]) / out.scale[j]);
        out.z.push_back(std::move(z));
    }
    return out;
}

std::vector<double> ridge_fit(const std::vector<std::vector<double>>& z,
                              const std::vector<double>& y_centered, double penalty) {
    const std::size_t n = z.size();
    const std::size_t f = z.front().size();
    std::vector<std::vector<double>> gram(f, std::vector<double>(f, 0.0));
    std::vector<double> rhs(f, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < f; ++a) {
            rhs[a] += z[i][a] * y_centered[i];
            for (std::size_t b = a; b < f; ++b) gram[a][b] += z[i][a] * z[i][b];
        }
    }
    for (std::size_t a = 0; a < f; ++a) {
        for (std::size_t b = 0; b < a; ++b) gram[a][b] = gram[b][a];
        gram[a][a] += penalty * static_cast<double>(n);
    }
    return solve_dense(std::move(gram), std::move(rhs));
}

double rbf(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-gamma * d2);
}

std::vector<double> kernel_fit(const std::vector<std::vector<double>>& z,
                               const std::vector<double>& y_centered, double gamma,
                               double penalty) {
    const std::size_t n = z.size();
    std::vector<std::vector<double>> k(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) k[i][j] = k[j][i] = rbf(z[i], z[j], gamma);
        k[i][i] += penalty * static_cast<double>(n);
    }
    return solve_dense(std::move(k), y_centered);
}

}  // namespace

DisturbanceModel train_disturbance_model(const std::vector<std::vector<double>>& features,
                                         const std::vector<double>& targets,
                                         const DisturbanceHyperparams& hp) {
    if (features.empty() || features.size() != targets.size())
        throw std::invalid_argument("train_disturbance_model: feature/target size mismatch");
    const std::size_t n = features.size();
    const std::size_t f = features.front().size();
    if (n < 2 * f)
        throw std::invalid_argument(
            "train_disturbance_model: need at least twice as many samples as features");
    if (hp.penalties.empty())
        throw std::invalid_argument("train_disturbance_model: empty penalty list");

    DisturbanceModel model;
    model.kind = hp.kind;
    model.gamma = hp.kernel_gamma;
    Normalized norm = normalize(features);
    model.feature_mean = norm.mean;
    model.feature_scale = norm.scale;
    model.active = norm.active;
    for (std::size_t j = 0; j < f; ++j)
        if (!norm.active[j])
            model.warnings.push_back("dropped zero-variance feature " + std::to_string(j));

    model.target_mean =
        std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);
    std::vector<double> y_centered(n);
    for (std::size_t i = 0; i < n; ++i) y_centered[i] = targets[i] - model.target_mean;

    auto fit_predict = [&](const std::vector<std::vector<double>>& ztr,
                           const std::vector<double>& ytr,
                           const std::vector<std::vector<double>>& zva, double penalty,
                           std::vector<double>& pred) {
        if (hp.kind == DisturbanceHyperparams::Kind::kRidge) {
            const std::vector<double> w = ridge_fit(ztr, ytr, penalty);
            pred.clear();
            for (const auto& z : zva) {
                double v = 0.0;
                for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * z[j];
                pred.push_back(v);
            }
        } else {
            const std::vector<double> alpha = kernel_fit(ztr, ytr, hp.kernel_gamma, penalty);
            pred.clear();
            for (const auto& z : zva) {
                double v = 0.0;
                for (std::size_t i = 0; i < ztr.size(); ++i)
                    v += alpha[i] * rbf(ztr[i], z, hp.kernel_gamma);
                pred.push_back(v);
            }
        }
    };

    double best_penalty = hp.penalties.front();
    if (hp.penalties.size() > 1) {
        // two-fold cross-validation on chronological halves
        const std::size_t half = n / 2;
        std::vector<std::vector<double>> za(norm.z.begin(), norm.z.begin() + half);
        std::vector<std::vector<double>> zb(norm.z.begin() + half, norm.z.end());
        std::vector<double> ya(y_centered.begin(), y_centered.begin() + half);
        std::vector<double> yb(y_centered.begin() + half, y_centered.end());
        double best_score = kHuge;
        for (double penalty : hp.penalties) {
            std::vector<double> pred;
            double ss = 0.0;
            std::size_t count = 0;
            fit_predict(za, ya, zb, penalty, pred);
            for (std::size_t i = 0; i < zb.size(); ++i) ss += (pred[i] - yb[i]) * (pred[i] - yb[i]);
            count += zb.size();
            fit_predict(zb, yb, za, penalty, pred);
            for (std::size_t i = 0; i < za.size(); ++i) ss += (pred[i] - ya[i]) * (pred[i] - ya[i]);
            count += za.size();
            const double score = std::sqrt(ss / static_cast<double>(count));
            if (score < best_score) {
                best_score = score;
                best_penalty = penalty;
            }
        }
    }
    model.penalty = best_penalty;

    if (hp.kind == DisturbanceHyperparams::Kind::kRidge) {
        model.weights = ridge_fit(norm.z, y_centered, best_penalty);
    } else {
        model.support = norm.z;
        model.alpha = kernel_fit(norm.z, y_centered, hp.kernel_gamma, best_penalty);
    }
    return model;
}

std::vector<double> predict_disturbance(const DisturbanceModel& d,
                                        const std::vector<std::vector<double>>& features) {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& raw : features) {
        if (raw.size() != d.num_features())
            throw std::invalid_argument("predict_disturbance: feature count mismatch");
        std::vector<double> z;
        for (std::size_t j = 0; j < raw.size(); ++j)
            if (d.active[j]) z.push_back((raw[j] - d.feature_mean[j]) / d.feature_scale[j]);
        double v = d.target_mean;
        if (d.kind == DisturbanceHyperparams::Kind::kRidge) {
            for (std::size_t j = 0; j < d.weights.size(); ++j) v += d.weights[j] * z[j];
        } else {
            for (std::size_t i = 0; i < d.support.size(); ++i) {
                double dist2 = 0.0;
                for (std::size_t j = 0; j < z.size(); ++j)
                    dist2 += (z[j] - d.support[i][j]) * (z[j] - d.support[i][j]);
                v += d.alpha[i] * std::exp(-d.gamma * dist2);
            }
        }
        out.push_back(v);
    }
    return out;
}

FitReport validate_model(const ThermalParams& p, const EffectiveModel& m,
                         const DisturbanceModel& d, const TrainingSeries& holdout) {
    FitReport report;
    report.params = p;
    report.a = m.a;
    if (holdout.size() < 2) return report;
    const auto features =
        disturbance_features(holdout.timestamps, holdout.t_out, holdout.ghi, holdout.wind);
    const std::vector<double> q_e_hat = predict_disturbance(d, features);
    std::vector<double> temp_err, power_err;
    for (std::size_t k = 0; k + 1 < holdout.size(); ++k) {
        const double theta = effective_boundary_temperature(p, holdout.t_out[k]);
        const double pred_t =
            m.a * holdout.t_in[k] + (1.0 - m.a) * (theta + m.r * (holdout.q_c[k] + q_e_hat[k]));
        temp_err.push_back(pred_t - holdout.t_in[k + 1]);
        const double pred_q =
            ((holdout.t_in[k + 1] - m.a * holdout.t_in[k]) / (1.0 - m.a) - theta) / m.r -
            q_e_hat[k];
        power_err.push_back(pred_q - holdout.q_c[k]);
    }
    report.rmse_temperature_validation = rmse(temp_err);
    report.rmse_power_validation = rmse(power_err);
    return report;
}

IdentifyResult identify(const TrainingSeries& series, const IdentifyOptions& options) {
    series.validate();
    if (series.size() < 48) throw std::runtime_error("identify: series too short");
    const std::size_t n = series.size();
    const auto split = static_cast<std::size_t>(
        std::lround(static_cast<double>(n) * (1.0 - options.validation_fraction)));
    auto slice = [&](std::size_t b, std::size_t e) {
        TrainingSeries out;
        out.timestamps.assign(series.timestamps.begin() + b, series.timestamps.begin() + e);
        out.t_in.assign(series.t_in.begin() + b, series.t_in.begin() + e);
        out.t_out.assign(series.t_out.begin() + b, series.t_out.begin() + e);
        out.q_c.assign(series.q_c.begin() + b, series.q_c.begin() + e);
        out.ghi.assign(series.ghi.begin() + b, series.ghi.begin() + e);
        out.wind.assign(series.wind.begin() + b, series.wind.begin() + e);
        if (!series.rh.empty())
            out.rh.assign(series.rh.begin() + b, series.rh.begin() + e);
        return out;
    };
    const TrainingSeries train = slice(0, split);
    const TrainingSeries holdout = slice(split, n);

    IdentifyResult result;
    const auto steady = detect_steady_windows(train, options.steady);
    result.outdoor = fit_outdoor_resistance(train, steady);
    const auto& grid = options.r_m_grid.empty() ? default_r_m_grid() : options.r_m_grid;
    result.mass = fit_mass_params(train, result.outdoor.r_out, grid);

    result.params = ThermalParams{result.outdoor.r_out, result.mass.r_m, result.mass.c,
                                  result.mass.t_m};
    result.params.validate();
    result.model = discretize(result.params, train.dt_hours());

    const std::vector<double> q_e_targets =
        invert_exogenous(train, result.params, result.model);
    auto features =
        disturbance_features(train.timestamps, train.t_out, train.ghi, train.wind);
    features.pop_back();  // targets pair sample k with transition k -> k+1
    result.disturbance = train_disturbance_model(features, q_e_targets, options.disturbance);

    result.report = validate_model(result.params, result.model, result.disturbance, holdout);
    result.report.train_begin = 0;
    result.report.train_end = split;
    result.report.validation_begin = split;
    result.report.validation_end = n;
    return result;
}

}  // namespace heatctl

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <fstream>

#include "heatctl/identification.hpp"
#include "heatctl/rng.hpp"
#include "support/oracles.hpp"

using namespace heatctl;
using testsupport::SyntheticOptions;
using testsupport::synthetic_series;

TEST_SUITE("identification") {

TEST_CASE("mass temperature is the time-average indoor temperature") {
    TrainingSeries s;
    s.timestamps = {0, 3600};
    s.t_in = {18.0, 22.0};
    s.t_out = {0.0, 0.0};
    s.q_c = {0.0, 0.0};
    s.ghi = {0.0, 0.0};
    s.wind = {0.0, 0.0};
    CHECK(estimate_mass_temperature(s) == doctest::Approx(20.0));
    s.t_in = {20.6, 20.6};
    CHECK(estimate_mass_temperature(s) == doctest::Approx(20.6));
    TrainingSeries empty;
    CHECK_THROWS_WITH_AS(estimate_mass_temperature(empty), "empty training series",
                         std::runtime_error);
    // mirrored-day construction keeps the mean at t_m
    const TrainingSeries synth = synthetic_series({});
    CHECK(estimate_mass_temperature(synth) == doctest::Approx(20.6).epsilon(1e-9));
}

TEST_CASE("steady window detection") {
    SteadyWindowCriteria crit;
    const TimePoint start = parse_iso8601("2022-11-11T00:00:00");
    auto series_with = [&](double drift_per_h) {
        TrainingSeries s;
        for (int h = 0; h < 48; ++h) {
            s.timestamps.push_back(start + h * 3600);
            s.t_in.push_back(20.0 + drift_per_h * h);
            s.t_out.push_back(0.0);
            s.q_c.push_back(1.0 + 0.1 * h);
            s.ghi.push_back(0.0);
            s.wind.push_back(0.0);
        }
        return s;
    };
    SUBCASE("constant overnight temperature selects all night indices") {
        const auto idx = detect_steady_windows(series_with(0.0), crit);
        int nights = 0;
        for (int h = 0; h + crit.window_hours < 48; ++h) {
            const int hod = h % 24;
            if (hod >= 23 || hod < 6) ++nights;
        }
        CHECK(static_cast<int>(idx.size()) == nights);
        for (std::size_t k : idx) {
            const int hod = static_cast<int>(k) % 24;
            CHECK((hod >= 23 || hod < 6));
        }
    }
    SUBCASE("a 1 degC/h ramp yields no windows at a 0.1 threshold") {
        CHECK(detect_steady_windows(series_with(1.0), crit).empty());
    }
    SUBCASE("alternating steady and drifting nights select exactly the steady ones") {
        TrainingSeries s;
        for (int h = 0; h < 96; ++h) {
            const int day = h / 24;
            const int hod = h % 24;
            const bool steady_day = day % 2 == 0;
            s.timestamps.push_back(start + h * 3600);
            s.t_in.push_back(steady_day ? 20.0 : 20.0 + 0.5 * hod);
            s.t_out.push_back(0.0);
            s.q_c.push_back(1.0);
            s.ghi.push_back(0.0);
            s.wind.push_back(0.0);
        }
        const auto idx = detect_steady_windows(s, crit);
        CHECK_FALSE(idx.empty());
        for (std::size_t k : idx) {
            // every selected window must lie fully inside a steady day
            for (int j = 0; j <= crit.window_hours; ++j)
                CHECK(s.t_in[k + j] == doctest::Approx(20.0));
        }
    }
}

TEST_CASE("outdoor resistance regression") {
    SUBCASE("two points define the line exactly") {
        TrainingSeries s;
        s.timestamps = {0, 3600};
        s.t_in = {1.0, 3.0};
        s.t_out = {0.0, 0.0};
        s.q_c = {0.0, 1.0};
        s.ghi = {0.0, 0.0};
        s.wind = {0.0, 0.0};
        const OutdoorFit fit = fit_outdoor_resistance(s, {0, 1});
        CHECK(fit.alpha == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.r_out == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("noise-free synthetic nights recover alpha and r_out exactly") {
        SyntheticOptions opt;
        opt.params.r_out = 2.04;
        const TrainingSeries s = synthetic_series(opt);
        const auto steady = detect_steady_windows(s, SteadyWindowCriteria{});
        REQUIRE(steady.size() >= 20);
        const OutdoorFit fit = fit_outdoor_resistance(s, steady);
        CHECK(fit.r_out == doctest::Approx(2.04).epsilon(1e-9));
        CHECK(fit.alpha == doctest::Approx(2.04 * opt.q_e).epsilon(1e-9));
    }
    SUBCASE("constant power is unidentifiable") {
        TrainingSeries s;
        for (int h = 0; h < 10; ++h) {
            s.timestamps.push_back(h * 3600);
            s.t_in.push_back(20.0);
            s.t_out.push_back(0.0);
            s.q_c.push_back(2.0);
            s.ghi.push_back(0.0);
            s.wind.push_back(0.0);
        }
        CHECK_THROWS_WITH_AS(fit_outdoor_resistance(s, {0, 1, 2, 3}),
                             "unidentifiable R_out: constant HVAC power in steady windows",
                             std::runtime_error);
    }
}

TEST_CASE("mass parameter grid search") {
    SyntheticOptions opt;  // true r_m = 1.06, a = exp(-1/(R*6.5))
    const TrainingSeries s = synthetic_series(opt);
    const EffectiveModel truth = discretize(opt.params, 1.0);
    SUBCASE("true candidate wins and recovers a to 1e-6") {
        const std::vector<double> grid = {0.3, 0.7, 1.06, 1.8, 3.0};
        const MassFit fit = fit_mass_params(s, 2.04, grid);
        CHECK(fit.r_m == doctest::Approx(1.06));
        CHECK(fit.a == doctest::Approx(truth.a).epsilon(1e-6));
        CHECK(fit.c == doctest::Approx(6.5).epsilon(1e-6));
        CHECK(fit.candidates.size() == grid.size());
    }
    SUBCASE("capacitance inversion is the closed form") {
        const MassFit fit = fit_mass_params(s, 2.04, {1.06});
        const double r = 1.06 * 2.04 / (1.06 + 2.04);
        CHECK(fit.c == doctest::Approx(-1.0 / (r * std::log(fit.a))).epsilon(1e-12));
    }
    SUBCASE("grid without stable candidates throws") {
        // a degenerate series with no dynamics information
        TrainingSeries flat;
        for (int h = 0; h < 6; ++h) {
            flat.timestamps.push_back(h * 3600);
            flat.t_in.push_back(20.0);
            flat.t_out.push_back(0.0);
            flat.q_c.push_back(0.0);
            flat.ghi.push_back(0.0);
            flat.wind.push_back(0.0);
        }
        CHECK_THROWS_WITH_AS(fit_mass_params(flat, 2.04, {1.0}), "no stable fit",
                             std::runtime_error);
    }
}

TEST_CASE("exogenous power inversion round-trips") {
    SyntheticOptions opt;
    const TrainingSeries s = synthetic_series(opt);
    const EffectiveModel m = discretize(opt.params, 1.0);
    SUBCASE("constant q_e recovers exactly") {
        const auto q_e = invert_exogenous(s, opt.params, m);
        REQUIRE(q_e.size() == s.size() - 1);
        for (double v : q_e) CHECK(v == doctest::Approx(opt.q_e).epsilon(1e-9));
    }
    SUBCASE("equilibrium data gives zero") {
        TrainingSeries eq;
        for (int h = 0; h < 8; ++h) {
            eq.timestamps.push_back(h * 3600);
            eq.t_in.push_back(20.6);   // equals t_m and theta when t_out = t_m
            eq.t_out.push_back(20.6);
            eq.q_c.push_back(0.0);
            eq.ghi.push_back(0.0);
            eq.wind.push_back(0.0);
        }
        for (double v : invert_exogenous(eq, opt.params, m))
            CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("a known varying q_e round-trips through the dynamics") {
        // forward-simulate with a pulse of exogenous heat, then invert
        TrainingSeries gen;
        Rng rng(5);
        double t = 20.6;
        for (int h = 0; h < 100; ++h) {
            const double t_out = 5.0 + 5.0 * std::sin(h / 7.0);
            const double q_c = 3.0 * rng.uniform();
            const double q_e = h == 50 ? 4.0 : (h % 3 == 0 ? 0.7 : 0.0);
            gen.timestamps.push_back(h * 3600);
            gen.t_in.push_back(t);
            gen.t_out.push_back(t_out);
            gen.q_c.push_back(q_c);
            gen.ghi.push_back(0.0);
            gen.wind.push_back(0.0);
            t = step(m, {t, effective_boundary_temperature(opt.params, t_out), q_c, q_e});
        }
        const auto recovered = invert_exogenous(gen, opt.params, m);
        for (int h = 0; h + 1 < 100; ++h) {
            const double expected = h == 50 ? 4.0 : (h % 3 == 0 ? 0.7 : 0.0);
            CHECK(recovered[h] == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("disturbance regressor") {
    SUBCASE("linear targets with a vanishing penalty fit to zero error") {
        Rng rng(61);
        std::vector<std::vector<double>> features;
        std::vector<double> targets;
        std::vector<TimePoint> ts;
        std::vector<double> t_out, ghi, wind;
        for (int i = 0; i < 200; ++i) {
            ts.push_back(i * 3600);
            t_out.push_back(-10.0 + 20.0 * rng.uniform());
            ghi.push_back(600.0 * rng.uniform());
            wind.push_back(8.0 * rng.uniform());
        }
        features = disturbance_features(ts, t_out, ghi, wind);
        for (int i = 0; i < 200; ++i)
            targets.push_back(0.4 - 0.03 * t_out[i] + 0.002 * ghi[i] + 0.05 * wind[i]);
        DisturbanceHyperparams hp;
        hp.penalties = {1e-10};
        const DisturbanceModel model = train_disturbance_model(features, targets, hp);
        const auto pred = predict_disturbance(model, features);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) worst = std::max(worst, std::abs(pred[i] - targets[i]));
        CHECK(worst < 1e-6);
    }
    SUBCASE("constant targets predict the constant") {
        std::vector<TimePoint> ts;
        std::vector<double> t_out, ghi, wind;
        Rng rng(67);
        for (int i = 0; i < 100; ++i) {
            ts.push_back(i * 3600);
            t_out.push_back(10.0 * rng.uniform());
            ghi.push_back(300.0 * rng.uniform());
            wind.push_back(5.0 * rng.uniform());
        }
        const auto features = disturbance_features(ts, t_out, ghi, wind);
        const std::vector<double> targets(100, 0.75);
        const DisturbanceModel model =
            train_disturbance_model(features, targets, DisturbanceHyperparams{});
        for (double v : predict_disturbance(model, features))
            CHECK(v == doctest::Approx(0.75).epsilon(1e-9));
    }
    SUBCASE("solar-driven synthetic load beats the documented error bar") {
        Rng rng(71);
        std::vector<TimePoint> ts;
        std::vector<double> t_out, ghi, wind;
        std::vector<double> targets;
        for (int i = 0; i < 400; ++i) {
            ts.push_back(i * 3600);
            t_out.push_back(-5.0 + 15.0 * rng.uniform());
            const int hod = static_cast<int>(i % 24);
            ghi.push_back(hod >= 8 && hod <= 17 ? 500.0 * rng.uniform() : 0.0);
            wind.push_back(6.0 * rng.uniform());
            targets.push_back(0.5 + 0.02 * ghi.back() / 100.0 + rng.normal(0.0, 0.1));
        }
        const auto features = disturbance_features(ts, t_out, ghi, wind);
        // holdout: last quarter
        const std::size_t split = 300;
        std::vector<std::vector<double>> train_f(features.begin(), features.begin() + split);
        std::vector<double> train_y(targets.begin(), targets.begin() + split);
        const DisturbanceModel model =
            train_disturbance_model(train_f, train_y, DisturbanceHyperparams{});
        std::vector<std::vector<double>> hold_f(features.begin() + split, features.end());
        const auto pred = predict_disturbance(model, hold_f);
        double ss = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double e = pred[i] - targets[split + i];
            ss += e * e;
        }
        CHECK(std::sqrt(ss / static_cast<double>(pred.size())) <= 0.15);
    }
    SUBCASE("predictions are invariant to affine feature rescaling") {
        Rng rng(73);
        std::vector<TimePoint> ts;
        std::vector<double> t_out, ghi, wind, targets;
        for (int i = 0; i < 150; ++i) {
            ts.push_back(i * 3600);
            t_out.push_back(-10.0 + 20.0 * rng.uniform());
            ghi.push_back(600.0 * rng.uniform());
            wind.push_back(8.0 * rng.uniform());
            targets.push_back(0.5 - 0.02 * t_out.back() + 0.001 * ghi.back() +
                              rng.normal(0.0, 0.05));
        }
        auto features = disturbance_features(ts, t_out, ghi, wind);
        for (DisturbanceHyperparams::Kind kind :
             {DisturbanceHyperparams::Kind::kRidge, DisturbanceHyperparams::Kind::kKernel}) {
            DisturbanceHyperparams hp;
            hp.kind = kind;
            const DisturbanceModel base = train_disturbance_model(features, targets, hp);
            const auto base_pred = predict_disturbance(base, features);
            // rescale the outdoor-temperature feature: degC -> tenths of degF offset
            auto scaled = features;
            for (auto& row : scaled) row[0] = row[0] * 1.8 + 32.0;
            const DisturbanceModel rescaled = train_disturbance_model(scaled, targets, hp);
            const auto scaled_pred = predict_disturbance(rescaled, scaled);
            for (std::size_t i = 0; i < base_pred.size(); ++i)
                CHECK(std::abs(base_pred[i] - scaled_pred[i]) <= 1e-6);
        }
    }
    SUBCASE("zero-variance features are dropped with a warning") {
        std::vector<TimePoint> ts;
        std::vector<double> t_out, ghi, wind, targets;
        Rng rng(79);
        for (int i = 0; i < 100; ++i) {
            ts.push_back(i * 3600);
            t_out.push_back(5.0 * rng.uniform());
            ghi.push_back(0.0);  // winter: no sun at all
            wind.push_back(3.0 * rng.uniform());
            targets.push_back(0.3 + 0.01 * t_out.back());
        }
        const auto features = disturbance_features(ts, t_out, ghi, wind);
        const DisturbanceModel model =
            train_disturbance_model(features, targets, DisturbanceHyperparams{});
        CHECK_FALSE(model.active[1]);
        CHECK_FALSE(model.warnings.empty());
    }
    SUBCASE("feature-count mismatch is an error") {
        std::vector<std::vector<double>> features(40, std::vector<double>(12, 1.0));
        for (std::size_t i = 0; i < features.size(); ++i) features[i][0] = static_cast<double>(i);
        std::vector<double> targets(40, 1.0);
        const DisturbanceModel model =
            train_disturbance_model(features, targets, DisturbanceHyperparams{});
        std::vector<std::vector<double>> bad(1, std::vector<double>(11, 0.0));
        CHECK_THROWS_AS(predict_disturbance(model, bad), std::invalid_argument);
    }
    SUBCASE("too few samples is an error") {
        std::vector<std::vector<double>> features(10, std::vector<double>(12, 0.0));
        std::vector<double> targets(10, 0.0);
        CHECK_THROWS_AS(train_disturbance_model(features, targets, DisturbanceHyperparams{}),
                        std::invalid_argument);
    }
}

TEST_CASE("validate_model on exact holdout gives zero error") {
    SyntheticOptions opt;
    const TrainingSeries s = synthetic_series(opt);
    const EffectiveModel m = discretize(opt.params, 1.0);
    // a disturbance model that predicts the exact constant
    const auto features = disturbance_features(s.timestamps, s.t_out, s.ghi, s.wind);
    const std::vector<double> targets(s.size(), opt.q_e);
    const DisturbanceModel d =
        train_disturbance_model(features, targets, DisturbanceHyperparams{});
    const FitReport report = validate_model(opt.params, m, d, s);
    CHECK(report.rmse_temperature_validation < 1e-8);
    CHECK(report.rmse_power_validation < 1e-7);
}

TEST_CASE("full pipeline recovers the generating parameters") {
    SyntheticOptions opt;
    const TrainingSeries s = synthetic_series(opt);
    IdentifyOptions options;
    options.r_m_grid = default_r_m_grid();
    options.r_m_grid.push_back(1.06);  // include the truth among the candidates
    std::sort(options.r_m_grid.begin(), options.r_m_grid.end());
    const IdentifyResult result = identify(s, options);
    const EffectiveModel truth = discretize(opt.params, 1.0);
    CHECK(result.params.r_out == doctest::Approx(2.04).epsilon(0.01));
    CHECK(result.mass.r_m == doctest::Approx(1.06).epsilon(0.01));
    CHECK(result.model.a == doctest::Approx(truth.a).epsilon(0.01));
    CHECK(result.report.rmse_temperature_validation < 0.05);
    CHECK(result.report.train_end == result.report.validation_begin);
}

TEST_CASE("noisy fixture stays within the plausibility bar") {
    SyntheticOptions opt;
    opt.noise_t_in = 0.05;
    opt.noise_q_c = 0.15;
    opt.seed = 2023;
    const TrainingSeries s = synthetic_series(opt);
    const IdentifyResult result = identify(s, IdentifyOptions{});
    CHECK(result.report.rmse_temperature_validation <= 0.5);
    CHECK(result.params.r_out == doctest::Approx(2.04).epsilon(0.15));
}

TEST_CASE("training csv round trip") {
    const char* path = "test_training_tmp.csv";
    {
        std::ofstream out(path);
        out << "timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct,t_in_c,q_c_kw\n";
        out << "2022-11-11T00:00:00,-2.0,0,3.1,70,20.5,4.2\n";
        out << "2022-11-11T01:00:00,-2.5,0,3.0,71,20.4,4.5\n";
        out << "2022-11-11T02:00:00,-3.0,0,2.9,72,20.3,4.8\n";
    }
    const TrainingSeries s = load_training_csv(path);
    CHECK(s.size() == 3);
    CHECK(s.t_in[1] == doctest::Approx(20.4));
    CHECK(s.q_c[2] == doctest::Approx(4.8));
    CHECK(s.dt_hours() == doctest::Approx(1.0));
    std::remove(path);
}

}  // TEST_SUITE

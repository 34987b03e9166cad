#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heatctl/config.hpp"

using namespace heatctl;
namespace fs = std::filesystem;

namespace {

std::string minimal_config(const std::string& weather = "", const std::string& training = "") {
    std::ostringstream ss;
    ss << "[paths]\n";
    if (!weather.empty()) ss << "weather_csv = " << weather << "\n";
    if (!training.empty()) ss << "training_csv = " << training << "\n";
    ss << "[thermal]\nr_out = 2.04\nr_m = 1.06\nc = 6.5\nt_m = 20.6\n";
    ss << "[scenario]\nstart = 2023-01-30T00:00:00\ndays = 1\n";
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("heatctl_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string make_cold_weather_csv(int hours, double mean = -8.0) {
    std::ostringstream ss;
    ss << "timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct\n";
    for (int h = 0; h < hours; ++h) {
        const int day = h / 24, hod = h % 24;
        char stamp[32];
        std::snprintf(stamp, sizeof(stamp), "2023-01-%02dT%02d:00:00", 20 + day, hod);
        const double t_out = mean - 4.0 * std::cos(2.0 * 3.14159 * (hod - 15) / 24.0);
        const double ghi = hod >= 8 && hod <= 17 ? 300.0 : 0.0;
        ss << stamp << "," << t_out << "," << ghi << ",3.0,75\n";
    }
    return ss.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("ini parsing") {
    const IniFile ini = IniFile::parse_string(
        "# comment\n[one]\na = 1.5\nlist = 1, 2,3\nflag = true\nname = x\n\n[two]\nb = -2\n");
    CHECK(ini.get_double("one", "a") == doctest::Approx(1.5));
    CHECK(ini.get_list("one", "list") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(ini.get_bool("one", "flag", false));
    CHECK(ini.get_string("one", "name") == "x");
    CHECK(ini.get_double("two", "b") == doctest::Approx(-2.0));
    CHECK(ini.get_double("two", "missing", 7.0) == doctest::Approx(7.0));
    CHECK_THROWS_AS(ini.get_double("one", "name"), std::runtime_error);
    CHECK_THROWS_AS(ini.get_string("nowhere", "key"), std::runtime_error);
    CHECK_THROWS_AS(IniFile::parse_string("bad line\n"), std::runtime_error);
    CHECK_THROWS_AS(IniFile::parse_string("[unclosed\n"), std::runtime_error);
}

TEST_CASE("run config defaults follow the reference deployment") {
    TempDir dir;
    write(dir.path / "c.ini", minimal_config());
    const RunConfig cfg = RunConfig::load((dir.path / "c.ini").string());
    CHECK(cfg.thermal.r_out == doctest::Approx(2.04));
    CHECK(cfg.plant.p_bar == doctest::Approx(4.5));
    CHECK(cfg.plant.p_r_bar == doctest::Approx(19.2));
    CHECK(cfg.plant.stages == std::vector<double>{9.6, 14.4, 19.2});
    CHECK(cfg.mpc.horizon == 24);
    CHECK(cfg.mpc.dt == doctest::Approx(1.0));
    CHECK(cfg.mpc.comfort_band == doctest::Approx(3.0));
    CHECK(cfg.mpc.price_energy_by_hour == std::vector<double>{0.15});
    CHECK(cfg.mpc.price_demand == doctest::Approx(0.8));
    CHECK(cfg.mpc.tuning.day_multiplier == doctest::Approx(1.1));
    CHECK(cfg.mpc.tuning.night_multiplier == doctest::Approx(0.2));
    CHECK(cfg.mpc.tuning.ppd_ceiling_pct == doctest::Approx(10.0));
    CHECK(cfg.defrost.events_per_day == doctest::Approx(2.7));
    CHECK(cfg.scenario_start == parse_iso8601("2023-01-30T00:00:00"));
}

TEST_CASE("range errors name the offending key") {
    TempDir dir;
    write(dir.path / "c.ini", minimal_config() + "[plant]\nstages = 19.2, 9.6\n");
    CHECK_THROWS_AS(RunConfig::load((dir.path / "c.ini").string()), std::invalid_argument);
    write(dir.path / "d.ini", minimal_config() + "[mpc]\nhorizon = 2.5\n");
    CHECK_THROWS_WITH_AS(RunConfig::load((dir.path / "d.ini").string()),
                         doctest::Contains("horizon"), std::runtime_error);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

namespace {

std::string binary_path() {
    const char* env = std::getenv("HEATCTL_BIN");
    REQUIRE_MESSAGE(env != nullptr, "HEATCTL_BIN must point at the CLI binary");
    return env;
}

int run(const std::string& cmd, std::string* output = nullptr) {
    const std::string full = cmd + " > cli_stdout.tmp 2> cli_stderr.tmp";
    const int rc = std::system(full.c_str());
    if (output) {
        output->clear();
        for (const char* name : {"cli_stdout.tmp", "cli_stderr.tmp"}) {
            std::ifstream in(name);
            std::stringstream ss;
            ss << in.rdbuf();
            *output += ss.str();
        }
    }
    std::remove("cli_stdout.tmp");
    std::remove("cli_stderr.tmp");
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing expected output file: " << p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("missing config file names the path") {
    std::string out;
    const int rc = run(binary_path() + " simulate --config /nonexistent/cfg.ini", &out);
    CHECK(rc != 0);
    CHECK(out.find("/nonexistent/cfg.ini") != std::string::npos);
}

TEST_CASE("unknown flags are hard errors") {
    std::string out;
    const int rc = run(binary_path() + " simulate --config x.ini --bogus", &out);
    CHECK(rc != 0);
}

TEST_CASE("help documents every subcommand") {
    std::string out;
    const int rc = run(binary_path() + " --help", &out);
    CHECK(rc == 0);
    for (const char* sub : {"identify", "plan", "simulate", "compare", "tune", "analyze"})
        CHECK(out.find(sub) != std::string::npos);
    std::string plan_help;
    CHECK(run(binary_path() + " plan --help", &plan_help) == 0);
    CHECK(plan_help.find("--start") != std::string::npos);
    CHECK(plan_help.find("--config") != std::string::npos);
}

TEST_CASE("plan and simulate produce their documented outputs") {
    TempDir dir;
    write(dir.path / "weather.csv", make_cold_weather_csv(72));
    std::ostringstream cfg;
    cfg << "[paths]\nweather_csv = " << (dir.path / "weather.csv").string() << "\n"
        << "output_dir = " << (dir.path / "out").string() << "\n"
        << "[thermal]\nr_out = 2.04\nr_m = 1.06\nc = 6.5\nt_m = 20.6\n"
        << "[mpc]\nt_ref_day = 21.5\nt_ref_night = 20\n"
        << "[scenario]\nstart = 2023-01-20T00:00:00\ndays = 1\npolicy = mpc\n"
        << "[analysis]\nmc_samples = 20000\n";
    write(dir.path / "c.ini", cfg.str());

    std::string out;
    REQUIRE(run(binary_path() + " plan --config " + (dir.path / "c.ini").string(), &out) == 0);
    const std::string plan = slurp(dir.path / "out" / "plan.csv");
    CHECK(plan.rfind("step,setpoint_c,q_c_kw,p_kw", 0) == 0);
    CHECK(std::count(plan.begin(), plan.end(), '\n') == 25);  // header + 24 steps

    REQUIRE(run(binary_path() + " simulate --config " + (dir.path / "c.ini").string(), &out) ==
            0);
    const std::string trace = slurp(dir.path / "out" / "trace.csv");
    CHECK(trace.rfind("timestamp_iso8601,t_in_c", 0) == 0);
}

TEST_CASE("compare is seed-reproducible byte for byte") {
    TempDir dir;
    write(dir.path / "weather.csv", make_cold_weather_csv(72));
    std::ostringstream cfg;
    cfg << "[paths]\nweather_csv = " << (dir.path / "weather.csv").string() << "\n"
        << "[thermal]\nr_out = 2.04\nr_m = 1.06\nc = 6.5\nt_m = 20.6\n"
        << "[mpc]\nt_ref_day = 21.5\nt_ref_night = 20\n"
        << "[benchmark]\npolicy = constant\nconstant_setpoint = 21.5\n"
        << "[forecast_error]\nsigma_t_out = 1.0\n"
        << "[scenario]\nstart = 2023-01-20T00:00:00\ndays = 2\n"
        << "[analysis]\nmc_samples = 20000\n";
    write(dir.path / "c.ini", cfg.str());

    const std::string base_cmd = binary_path() + " compare --config " +
                                 (dir.path / "c.ini").string() + " --seed 11 --out ";
    REQUIRE(run(base_cmd + (dir.path / "run1").string()) == 0);
    REQUIRE(run(base_cmd + (dir.path / "run2").string()) == 0);
    for (const char* name :
         {"trace_mpc.csv", "trace_baseline.csv", "daily_mpc.csv", "savings.txt"}) {
        CHECK_MESSAGE(slurp(dir.path / "run1" / name) == slurp(dir.path / "run2" / name),
                      "outputs differ for " << name);
    }
    // a different seed changes the forecast noise, hence the trace
    REQUIRE(run(binary_path() + " compare --config " + (dir.path / "c.ini").string() +
                " --seed 12 --out " + (dir.path / "run3").string()) == 0);
    CHECK(slurp(dir.path / "run1" / "trace_mpc.csv") !=
          slurp(dir.path / "run3" / "trace_mpc.csv"));
}

TEST_CASE("identify writes a model and report from a training file") {
    TempDir dir;
    // training fixture: synthetic but plausible; reuse the library itself is
    // not allowed for the CSV, so write a file the loader accepts
    std::ostringstream csv;
    csv << "timestamp_iso8601,t_out_c,ghi_wm2,wind_ms,rh_pct,t_in_c,q_c_kw\n";
    // forward-generate from the reference parameters with constant q_e
    const double r_out = 2.04, r_m = 1.06, c = 6.5, t_m = 20.6, q_e = 0.5;
    const double r = r_m * r_out / (r_m + r_out);
    const double a = std::exp(-1.0 / (r * c));
    double t = t_m;
    for (int h = 0; h < 24 * 20; ++h) {
        const int day = h / 24, hod = h % 24;
        const double t_out = -2.0 + 6.0 * std::sin(h / 30.0);
        const double theta = (r_out * t_m + r_m * t_out) / (r_m + r_out);
        const bool night = hod >= 23 || hod < 6;
        double q_c;
        if (night)
            q_c = ((t_m - a * t) / (1.0 - a) - theta) / r - q_e;
        else
            q_c = (t_m - theta) / r - q_e +
                  (day % 2 == 0 ? 1.0 : -1.0) * 1.5 * std::sin(3.14159 * (hod - 6) / 17.0);
        if (q_c < 0.0) q_c = 0.0;
        char stamp[40];
        std::snprintf(stamp, sizeof(stamp), "2022-11-%02dT%02d:00:00", 1 + day, hod);
        csv << stamp << "," << t_out << ",0,3.0,65," << t << "," << q_c << "\n";
        t = a * t + (1.0 - a) * (theta + r * (q_c + q_e));
    }
    write(dir.path / "training.csv", csv.str());
    std::ostringstream cfg;
    cfg << "[paths]\ntraining_csv = " << (dir.path / "training.csv").string() << "\n"
        << "output_dir = " << (dir.path / "out").string() << "\n"
        << "[thermal]\nidentify = true\n";
    write(dir.path / "c.ini", cfg.str());
    std::string out;
    REQUIRE(run(binary_path() + " identify --config " + (dir.path / "c.ini").string(), &out) ==
            0);
    const std::string model = slurp(dir.path / "out" / "model.ini");
    CHECK(model.find("r_out") != std::string::npos);
    const IniFile fitted = IniFile::parse_string(model);
    CHECK(fitted.get_double("thermal", "r_out") == doctest::Approx(2.04).epsilon(0.05));
    CHECK(slurp(dir.path / "out" / "fit_report.txt").find("validation temperature rmse") !=
          std::string::npos);
}

TEST_CASE("missing weather file exits nonzero and names the path") {
    TempDir dir;
    std::ostringstream cfg;
    cfg << "[paths]\nweather_csv = " << (dir.path / "missing.csv").string() << "\n"
        << "[thermal]\nr_out = 2.04\nr_m = 1.06\nc = 6.5\nt_m = 20.6\n";
    write(dir.path / "c.ini", cfg.str());
    std::string out;
    const int rc = run(binary_path() + " simulate --config " + (dir.path / "c.ini").string(),
                       &out);
    CHECK(rc != 0);
    CHECK(out.find("missing.csv") != std::string::npos);
}

}  // TEST_SUITE

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "waveqed/scenario.hpp"

using namespace waveqed;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag)
{
    const auto dir = fs::temp_directory_path() /
                     ("waveqed_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json small_scenario()
{
    return nlohmann::json::parse(R"({
        "name": "small",
        "topology": ["lambda", "v"],
        "rates": {"gamma_p": 0.01, "gamma_d": 0.01, "gamma_nr": 0.02},
        "drives": {"delta_p": 0.0, "delta_d": 0.0},
        "sweeps": [
            {"variable": "omega_d", "start": 0.01, "stop": 0.05, "count": 5, "scale": "linear"},
            {"variable": "omega_p", "values": [0.002, 0.005]}
        ],
        "observables": ["eta_c", "eta_inc", "eta_total", "transport", "g2_zero"]
    })");
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(WAVEQED_CLI_PATH) + " " + args;
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST(ScenarioParse, AxesAndGrids)
{
    const Scenario s = parse_scenario(small_scenario());
    EXPECT_EQ(s.name, "small");
    ASSERT_EQ(s.topologies.size(), 2u);
    ASSERT_EQ(s.axes.size(), 2u);
    EXPECT_EQ(s.axes[0].values.size(), 5u);
    EXPECT_NEAR(s.axes[0].values[1], 0.02, 1e-15);
    EXPECT_EQ(s.axes[1].values.size(), 2u);
    EXPECT_NO_THROW(validate_scenario(s));
}

TEST(ScenarioParse, LogAxis)
{
    auto j = small_scenario();
    j["sweeps"][0] = {{"variable", "omega_d"}, {"start", 1e-3}, {"stop", 1e-1},
                      {"count", 3}, {"scale", "log"}};
    const Scenario s = parse_scenario(j);
    EXPECT_NEAR(s.axes[0].values[1], 1e-2, 1e-12);
}

TEST(ScenarioValidate, Errors)
{
    auto j = small_scenario();
    j["topology"] = "ladder";
    EXPECT_THROW(validate_scenario(parse_scenario(j)), InvalidScenario); // eta_c for ladder

    j = small_scenario();
    j["topology"] = "triangle";
    EXPECT_THROW(parse_scenario(j), InvalidScenario);

    j = small_scenario();
    j["sweeps"].push_back({{"variable", "delta_p"}, {"values", {0.0, 0.1}}});
    EXPECT_THROW(validate_scenario(parse_scenario(j)), InvalidScenario); // 3 axes

    j = small_scenario();
    j["observables"] = {"phase_response"};
    EXPECT_THROW(validate_scenario(parse_scenario(j)), InvalidScenario); // no delta grid

    j = small_scenario();
    j["observables"] = {"kk_check"};
    EXPECT_THROW(validate_scenario(parse_scenario(j)), InvalidScenario); // no kk grid

    j = small_scenario();
    j["sweeps"][0]["count"] = 0;
    EXPECT_THROW(parse_scenario(j), InvalidScenario);
}

TEST(ScenarioRun, SingleDegenerateSweepPoint)
{
    auto j = small_scenario();
    j["name"] = "degenerate";
    j["topology"] = "lambda";
    j["sweeps"] = {nlohmann::json{{"variable", "omega_d"}, {"start", 0.03}, {"stop", 0.03},
                                  {"count", 1}, {"scale", "linear"}}};
    j["drives"]["omega_p"] = 0.005;
    j["observables"] = {"eta_c"};
    const Scenario s = parse_scenario(j);
    const auto dir = make_temp_dir("degenerate");
    const auto report = run_scenario(s, {.out_dir = dir});
    EXPECT_EQ(report.failed_points, 0);
    const std::string csv = slurp(dir / "degenerate_lambda_eta_c.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega_d,eta_c");
    // header plus exactly one data row
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    fs::remove_all(dir);
}

TEST(ScenarioRun, DeterministicAcrossRunsAndJobs)
{
    const Scenario s = parse_scenario(small_scenario());
    const auto d1 = make_temp_dir("det1");
    const auto d2 = make_temp_dir("det2");
    const auto d3 = make_temp_dir("det3");
    run_scenario(s, {.out_dir = d1, .jobs = 1});
    run_scenario(s, {.out_dir = d2, .jobs = 1});
    run_scenario(s, {.out_dir = d3, .jobs = 4});
    for (const auto& entry : fs::directory_iterator(d1)) {
        const auto name = entry.path().filename();
        const std::string ref = slurp(entry.path());
        EXPECT_EQ(ref, slurp(d2 / name)) << name;
        EXPECT_EQ(ref, slurp(d3 / name)) << name;
        EXPECT_FALSE(ref.empty());
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST(ScenarioRun, FailedPointsLeaveBlankCellsAndSidecar)
{
    auto j = small_scenario();
    j["name"] = "failing";
    j["topology"] = "lambda";
    // omega_p sweep hitting zero: probe observables undefined at that point
    j["sweeps"] = {nlohmann::json{{"variable", "omega_p"}, {"values", {0.0, 0.005}}}};
    j["drives"]["omega_d"] = 0.03;
    j["observables"] = {"eta_c"};
    const Scenario s = parse_scenario(j);
    const auto dir = make_temp_dir("failing");
    const auto report = run_scenario(s, {.out_dir = dir});
    EXPECT_EQ(report.failed_points, 1);
    const std::string csv = slurp(dir / "failing_lambda_eta_c.csv");
    std::istringstream lines(csv);
    std::string header, row0, row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    EXPECT_EQ(row0.back(), ','); // empty observable cell
    EXPECT_NE(row1.back(), ',');
    EXPECT_TRUE(fs::exists(dir / "failing_errors.txt"));
    fs::remove_all(dir);
}

TEST(ScenarioRun, EmitPlotsWritesScript)
{
    auto j = small_scenario();
    j["topology"] = "lambda";
    j["observables"] = {"eta_c"};
    const Scenario s = parse_scenario(j);
    const auto dir = make_temp_dir("plots");
    run_scenario(s, {.out_dir = dir, .emit_plots = true});
    EXPECT_TRUE(fs::exists(dir / "small_plot.py"));
    fs::remove_all(dir);
}

// Caption parameters transcribed from the corresponding figures, asserted
// against the bundled scenario data files.
TEST(BundledScenarios, CaptionTranscriptionTable)
{
    struct Row {
        const char* name;
        double gamma_p, gamma_d, gamma_nr, gamma_l2, gamma_l3;
    };
    const Row rows[] = {
        {"fig2a", 0.01, 0.01, 0.02, 0.0, 0.0},
        {"fig3", 0.01, 0.0001, 0.03, 0.0, 0.0},
        {"fig4", 0.01, 0.01, 0.02, 0.0, 0.0},
        {"fig5", 0.01, 0.01, 0.02, 0.0, 0.0},
        {"fig6", 0.0025, 0.005, 0.0, 0.0028, 0.0118},
        {"fig7", 0.0025, 0.005, 0.0, 0.0028, 0.0118},
        {"fig8", 0.0025, 0.005, 0.0, 0.0028, 0.0118},
        {"fig9", 0.0025, 0.005, 0.001, 0.0028, 0.0118},
    };
    const fs::path dir = WAVEQED_SCENARIO_DIR;
    for (const Row& r : rows) {
        const Scenario s = parse_scenario_file(dir / (std::string(r.name) + ".json"));
        EXPECT_NO_THROW(validate_scenario(s));
        EXPECT_EQ(s.rates.gamma_p, r.gamma_p) << r.name;
        EXPECT_EQ(s.rates.gamma_d, r.gamma_d) << r.name;
        EXPECT_EQ(s.rates.gamma_nr, r.gamma_nr) << r.name;
        EXPECT_EQ(s.rates.gamma_l2, r.gamma_l2) << r.name;
        EXPECT_EQ(s.rates.gamma_l3, r.gamma_l3) << r.name;
        EXPECT_EQ(s.drives.delta_d, 0.0) << r.name;
    }
    // drive amplitudes pinned by the captions
    EXPECT_EQ(parse_scenario_file(dir / "fig6.json").drives.omega_d, 0.01414);
    EXPECT_EQ(parse_scenario_file(dir / "fig9.json").drives.omega_d, 0.01414);
    EXPECT_EQ(parse_scenario_file(dir / "fig5.json").drives.omega_p, 0.005);
}

TEST(Cli, ListShowsEightBundledScenarios)
{
    const auto dir = make_temp_dir("cli_list");
    const auto out = dir / "list.txt";
    setenv("WAVEQED_SCENARIO_DIR", WAVEQED_SCENARIO_DIR, 1);
    ASSERT_EQ(run_cli("list > " + out.string()), 0);
    std::istringstream lines(slurp(out));
    std::vector<std::string> names;
    for (std::string line; std::getline(lines, line);)
        names.push_back(line);
    EXPECT_EQ(names.size(), 8u);
    EXPECT_EQ(names.front(), "fig2a");
    EXPECT_EQ(names.back(), "fig9");
    fs::remove_all(dir);
}

TEST(Cli, UnknownScenarioExitsTwo)
{
    setenv("WAVEQED_SCENARIO_DIR", WAVEQED_SCENARIO_DIR, 1);
    EXPECT_EQ(run_cli("run no_such_scenario --out /tmp 2>/dev/null"), 2);
}

TEST(Cli, RunsBundledScenarioByName)
{
    const auto dir = make_temp_dir("cli_run");
    setenv("WAVEQED_SCENARIO_DIR", WAVEQED_SCENARIO_DIR, 1);
    ASSERT_EQ(run_cli("run fig2a --out " + dir.string() + " --jobs 2 > /dev/null"), 0);
    EXPECT_TRUE(fs::exists(dir / "fig2a_lambda_eta_c.csv"));
    EXPECT_TRUE(fs::exists(dir / "fig2a_lambda_eta_c_approx.csv"));
    const std::string csv = slurp(dir / "fig2a_lambda_eta_c.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega_d,omega_p,eta_c");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 201 * 3);
    fs::remove_all(dir);
}

TEST(Cli, OutDirEnvOverride)
{
    const auto dir = make_temp_dir("cli_env");
    setenv("WAVEQED_SCENARIO_DIR", WAVEQED_SCENARIO_DIR, 1);
    setenv("WAVEQED_OUT_DIR", dir.c_str(), 1);
    ASSERT_EQ(run_cli("run fig2a > /dev/null"), 0);
    EXPECT_TRUE(fs::exists(dir / "fig2a_lambda_eta_c.csv"));
    unsetenv("WAVEQED_OUT_DIR");
    fs::remove_all(dir);
}

// Scenario runner CLI: execute parameter sweeps and emit CSV datasets.
//
//   waveqed list
//   waveqed run <scenario-file|bundled-name> [--out DIR] [--jobs N] [--emit-plots]
//
// Bundled scenarios are data files resolved from WAVEQED_SCENARIO_DIR (or the
// build-time default). WAVEQED_OUT_DIR overrides the default output directory.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waveqed/scenario.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scenario_dir()
{
    if (const char* env = std::getenv("WAVEQED_SCENARIO_DIR"))
        return env;
#ifdef WAVEQED_BUNDLED_SCENARIOS
    return WAVEQED_BUNDLED_SCENARIOS;
#else
    return "scenarios";
#endif
}

std::vector<std::string> bundled_names()
{
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(scenario_dir(), ec))
        if (entry.path().extension() == ".json")
            names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

void print_error(const std::string& code, const std::string& message)
{
    std::cerr << "{\"error\":\"" << code << "\",\"message\":\"" << message << "\"}\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"three-level emitter waveguide scattering scenario runner"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list bundled scenarios");

    std::string target;
    std::string out_dir;
    unsigned jobs = 1;
    bool emit_plots = false;
    auto* run_cmd = app.add_subcommand("run", "run a scenario and write CSV datasets");
    run_cmd->add_option("scenario", target, "scenario file or bundled name")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--jobs", jobs, "parallel sweep workers");
    run_cmd->add_flag("--emit-plots", emit_plots, "also write a plotting script");

    CLI11_PARSE(app, argc, argv);

    if (list_cmd->parsed()) {
        for (const auto& n : bundled_names())
            std::cout << n << '\n';
        return 0;
    }

    fs::path path = target;
    if (!fs::exists(path)) {
        const fs::path bundled = scenario_dir() / (target + ".json");
        if (fs::exists(bundled)) {
            path = bundled;
        } else {
            print_error("unknown_scenario", "no scenario file or bundled name '" + target + "'");
            return 2;
        }
    }

    waveqed::RunOptions opts;
    if (!out_dir.empty())
        opts.out_dir = out_dir;
    else if (const char* env = std::getenv("WAVEQED_OUT_DIR"))
        opts.out_dir = env;
    opts.jobs = jobs;
    opts.emit_plots = emit_plots;

    try {
        const waveqed::Scenario scenario = waveqed::parse_scenario_file(path);
        const waveqed::RunReport report = waveqed::run_scenario(scenario, opts);
        for (const auto& f : report.files)
            std::cout << f.string() << '\n';
        if (report.failed_points > 0) {
            std::cerr << report.failed_points << " sweep point(s) failed; see errors sidecar\n";
            return 3;
        }
    } catch (const waveqed::InvalidScenario& e) {
        print_error("invalid_scenario", e.what());
        return 2;
    } catch (const waveqed::Error& e) {
        print_error("run_failed", e.what());
        return 3;
    }
    return 0;
}

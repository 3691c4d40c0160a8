#pragma once

// Scenario runner: parse a run configuration, execute parameter sweeps across
// the library, and emit one CSV dataset per (topology, observable).
//
// CSV format: UTF-8, comma-separated, '.' decimal, scientific notation with
// 15 significant digits; header row names the columns (sweep variables first,
// then grid and observable columns, complex values split into re/im); output
// is deterministic for identical input.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "waveqed/kerr.hpp"
#include "waveqed/kk.hpp"
#include "waveqed/observables.hpp"

namespace waveqed {

enum class Observable {
    Transport,
    EtaC,
    EtaCApprox,
    EtaInc,
    EtaIncApprox,
    EtaTotal,
    G2Curve,
    G2Zero,
    PhaseResponse,
    AmplitudeResponse,
    KerrCoefficient,
    KkCheck,
};

inline const char* observable_name(Observable o)
{
    switch (o) {
    case Observable::Transport: return "transport";
    case Observable::EtaC: return "eta_c";
    case Observable::EtaCApprox: return "eta_c_approx";
    case Observable::EtaInc: return "eta_inc";
    case Observable::EtaIncApprox: return "eta_inc_approx";
    case Observable::EtaTotal: return "eta_total";
    case Observable::G2Curve: return "g2_curve";
    case Observable::G2Zero: return "g2_zero";
    case Observable::PhaseResponse: return "phase_response";
    case Observable::AmplitudeResponse: return "amplitude_response";
    case Observable::KerrCoefficient: return "kerr_coefficient";
    case Observable::KkCheck: return "kk_check";
    }
    return "?";
}

struct SweepAxis {
    std::string variable;
    std::vector<double> values;
};

struct Scenario {
    std::string name;
    std::vector<Topology> topologies;
    RateSet rates;
    DriveSet drives;
    std::vector<SweepAxis> axes;
    std::vector<Observable> observables;
    std::optional<std::vector<double>> tau_grid;  // default: from rates
    std::vector<double> delta_grid;               // response / kerr grids
    std::optional<KKGrid> kk_grid;
};

namespace detail {

inline Topology parse_topology(const std::string& s)
{
    if (s == "lambda")
        return Topology::Lambda;
    if (s == "v")
        return Topology::V;
    if (s == "ladder" || s == "xi")
        return Topology::Ladder;
    throw InvalidScenario("unknown topology '" + s + "'");
}

inline Observable parse_observable(const std::string& s)
{
    for (Observable o : {Observable::Transport, Observable::EtaC, Observable::EtaCApprox,
                         Observable::EtaInc, Observable::EtaIncApprox, Observable::EtaTotal,
                         Observable::G2Curve, Observable::G2Zero, Observable::PhaseResponse,
                         Observable::AmplitudeResponse, Observable::KerrCoefficient,
                         Observable::KkCheck})
        if (s == observable_name(o))
            return o;
    throw InvalidScenario("unknown observable '" + s + "'");
}

inline void set_variable(RateSet& r, DriveSet& d, const std::string& var, double v)
{
    if (var == "omega_p") d.omega_p = v;
    else if (var == "omega_d") d.omega_d = v;
    else if (var == "delta_p") d.delta_p = v;
    else if (var == "delta_d") d.delta_d = v;
    else if (var == "gamma_p") r.gamma_p = v;
    else if (var == "gamma_d") r.gamma_d = v;
    else if (var == "gamma_nr") r.gamma_nr = v;
    else if (var == "gamma_l2") r.gamma_l2 = v;
    else if (var == "gamma_l3") r.gamma_l3 = v;
    else throw InvalidScenario("unknown sweep variable '" + var + "'");
}

inline std::vector<double> expand_axis(const nlohmann::json& j)
{
    if (j.contains("values"))
        return j.at("values").get<std::vector<double>>();
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const int count = j.at("count").get<int>();
    if (count < 1)
        throw InvalidScenario("sweep count must be >= 1");
    const std::string scale = j.value("scale", "linear");
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = start;
        return v;
    }
    if (scale == "linear") {
        for (int i = 0; i < count; ++i)
            v[i] = start + (stop - start) * i / double(count - 1);
    } else if (scale == "log") {
        if (start <= 0.0 || stop <= 0.0)
            throw InvalidScenario("log axis needs positive start/stop");
        for (int i = 0; i < count; ++i)
            v[i] = start * std::pow(stop / start, i / double(count - 1));
    } else {
        throw InvalidScenario("axis scale must be linear or log");
    }
    return v;
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.14e", v);
    return buf;
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j)
{
    Scenario s;
    try {
        s.name = j.at("name").get<std::string>();
        if (j.at("topology").is_array()) {
            for (const auto& t : j.at("topology"))
                s.topologies.push_back(detail::parse_topology(t.get<std::string>()));
        } else {
            const auto t = j.at("topology").get<std::string>();
            if (t == "all")
                s.topologies = {Topology::Lambda, Topology::V, Topology::Ladder};
            else
                s.topologies = {detail::parse_topology(t)};
        }
        if (j.contains("rates")) {
            const auto& r = j.at("rates");
            s.rates.gamma_p = r.value("gamma_p", 0.0);
            s.rates.gamma_d = r.value("gamma_d", 0.0);
            s.rates.gamma_nr = r.value("gamma_nr", 0.0);
            s.rates.gamma_l2 = r.value("gamma_l2", 0.0);
            s.rates.gamma_l3 = r.value("gamma_l3", 0.0);
        }
        if (j.contains("drives")) {
            const auto& d = j.at("drives");
            s.drives.omega_p = d.value("omega_p", 0.0);
            s.drives.omega_d = d.value("omega_d", 0.0);
            s.drives.delta_p = d.value("delta_p", 0.0);
            s.drives.delta_d = d.value("delta_d", 0.0);
        }
        for (const auto& a : j.value("sweeps", nlohmann::json::array())) {
            SweepAxis axis;
            axis.variable = a.at("variable").get<std::string>();
            axis.values = detail::expand_axis(a);
            s.axes.push_back(std::move(axis));
        }
        for (const auto& o : j.at("observables"))
            s.observables.push_back(detail::parse_observable(o.get<std::string>()));
        if (j.contains("tau_grid")) {
            const auto& t = j.at("tau_grid");
            const double tmax = t.at("max").get<double>();
            const int count = t.value("count", 400);
            std::vector<double> grid(count);
            grid[0] = 0.0;
            const double t0 = tmax * 1e-3;
            for (int k = 1; k < count; ++k)
                grid[k] = t0 * std::pow(tmax / t0, (k - 1) / double(count - 2));
            grid.back() = tmax;
            s.tau_grid = std::move(grid);
        }
        if (j.contains("delta_grid"))
            s.delta_grid = detail::expand_axis(j.at("delta_grid"));
        if (j.contains("kk_grid")) {
            const auto& k = j.at("kk_grid");
            s.kk_grid.emplace(k.at("half_width").get<double>(), k.at("n_points").get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidScenario(std::string("malformed scenario: ") + e.what());
    }
    return s;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidScenario("cannot open scenario file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidScenario(std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse_scenario(j);
}

inline void validate_scenario(const Scenario& s)
{
    if (s.name.empty())
        throw InvalidScenario("scenario needs a name");
    if (s.topologies.empty())
        throw InvalidScenario("scenario needs at least one topology");
    if (!s.rates.valid())
        throw InvalidScenario("rates must be nonnegative");
    if (s.axes.size() > 2)
        throw InvalidScenario("at most 2 sweep axes per scenario");
    for (const auto& a : s.axes) {
        if (a.values.empty())
            throw InvalidScenario("sweep axis '" + a.variable + "' is empty");
        RateSet r = s.rates;
        DriveSet d = s.drives;
        detail::set_variable(r, d, a.variable, a.values.front());
    }
    if (s.observables.empty())
        throw InvalidScenario("scenario needs at least one observable");
    const bool needs_delta =
        std::any_of(s.observables.begin(), s.observables.end(), [](Observable o) {
            return o == Observable::PhaseResponse || o == Observable::AmplitudeResponse ||
                   o == Observable::KerrCoefficient;
        });
    if (needs_delta && s.delta_grid.empty())
        throw InvalidScenario("response observables need a delta_grid");
    if (std::any_of(s.observables.begin(), s.observables.end(),
                    [](Observable o) { return o == Observable::KkCheck; }) &&
        !s.kk_grid)
        throw InvalidScenario("kk_check needs a kk_grid");
    for (Topology t : s.topologies) {
        if (t != Topology::Ladder)
            continue;
        for (Observable o : s.observables)
            if (o == Observable::EtaC || o == Observable::EtaCApprox ||
                o == Observable::EtaInc || o == Observable::EtaIncApprox)
                throw InvalidScenario(std::string(observable_name(o)) +
                                      " is not valid for a ladder emitter");
    }
}

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned jobs = 1;
    bool emit_plots = false;
};

struct RunReport {
    std::vector<std::filesystem::path> files;
    int failed_points = 0;
};

namespace detail {

struct SweepPoint {
    std::vector<double> coords; // one per axis
    RateSet rates;
    DriveSet drives;
};

inline std::vector<SweepPoint> expand_points(const Scenario& s)
{
    std::vector<SweepPoint> pts;
    size_t total = 1;
    for (const auto& a : s.axes)
        total *= a.values.size();
    pts.reserve(total);
    for (size_t idx = 0; idx < total; ++idx) {
        SweepPoint p;
        p.rates = s.rates;
        p.drives = s.drives;
        size_t rem = idx;
        for (const auto& a : s.axes) { // first axis fastest
            const size_t i = rem % a.values.size();
            rem /= a.values.size();
            p.coords.push_back(a.values[i]);
            set_variable(p.rates, p.drives, a.variable, a.values[i]);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

struct PointOutput {
    std::string rows;  // formatted CSV rows (possibly several lines)
    std::string error; // nonempty if the point failed
};

inline std::string row_prefix(const SweepPoint& p)
{
    std::string s;
    for (double c : p.coords) {
        s += fmt(c);
        s += ',';
    }
    return s;
}

inline std::string blank_row(const SweepPoint& p, int n_value_cols)
{
    std::string s = row_prefix(p);
    for (int i = 1; i < n_value_cols; ++i)
        s += ',';
    if (!p.coords.empty() && n_value_cols == 0)
        s.pop_back();
    s += '\n';
    return s;
}

// Unwrapped exact response sampled over the KK grid.
struct SampledResponse {
    std::vector<double> abs;
    std::vector<double> phase;
};

inline SampledResponse sample_exact_response(Topology t, const RateSet& g, const DriveSet& d,
                                             const KKGrid& grid)
{
    SampledResponse r;
    const int n = grid.n_points;
    r.abs.resize(n);
    std::vector<double> raw(n);
    for (int i = 0; i < n; ++i) {
        const cplx chi = susceptibility(t, g, d, grid.point(i));
        r.abs[i] = amplitude_abs(chi);
        raw[i] = phase(chi);
    }
    r.phase = unwrap_phase(raw);
    return r;
}

inline PointOutput evaluate_point(const Scenario& s, Topology topo, Observable obs,
                                  const SweepPoint& p)
{
    PointOutput out;
    try {
        switch (obs) {
        case Observable::Transport: {
            const EmitterSystem sys = build_system(topo, p.rates, p.drives);
            const auto tr = transport(sys, steady_state(sys));
            out.rows = row_prefix(p) + fmt(tr.t_probe) + ',' + fmt(tr.r_probe) + ',' +
                       fmt(tr.t_drive) + ',' + fmt(tr.r_drive) + '\n';
            break;
        }
        case Observable::EtaC: {
            const EmitterSystem sys = build_system(topo, p.rates, p.drives);
            out.rows = row_prefix(p) + fmt(coherent_amplification(sys, steady_state(sys))) + '\n';
            break;
        }
        case Observable::EtaCApprox:
            out.rows = row_prefix(p) + fmt(coherent_amplification_approx(topo, p.rates, p.drives)) + '\n';
            break;
        case Observable::EtaInc: {
            const EmitterSystem sys = build_system(topo, p.rates, p.drives);
            out.rows = row_prefix(p) + fmt(incoherent_amplification(sys, steady_state(sys))) + '\n';
            break;
        }
        case Observable::EtaIncApprox:
            out.rows = row_prefix(p) + fmt(incoherent_amplification_approx(topo, p.rates, p.drives)) + '\n';
            break;
        case Observable::EtaTotal: {
            const EmitterSystem sys = build_system(topo, p.rates, p.drives);
            out.rows = row_prefix(p) + fmt(total_amplification(sys, steady_state(sys))) + '\n';
            break;
        }
        case Observable::G2Zero: {
            const EmitterSystem sys = build_system(topo, p.rates, p.drives);
            out.rows = row_prefix(p) + fmt(g2_zero(sys, steady_state(sys))) + '\n';
            break;
        }
        case Observable::G2Curve: {
            const EmitterSystem sys = build_system(topo, p.rates, p.drives);
            const std::vector<double> grid =
                s.tau_grid ? *s.tau_grid : default_tau_grid(p.rates);
            const G2Curve c = g2_curve(sys, grid);
            for (size_t k = 0; k < c.tau_grid.size(); ++k)
                out.rows += row_prefix(p) + fmt(c.tau_grid[k]) + ',' + fmt(c.values[k]) + '\n';
            break;
        }
        case Observable::AmplitudeResponse: {
            const auto r = cross_kerr_shift(topo, p.rates, p.drives, s.delta_grid);
            for (size_t k = 0; k < r.delta_grid.size(); ++k)
                out.rows += row_prefix(p) + fmt(r.delta_grid[k]) + ',' +
                            fmt(r.amplitude[k].real()) + ',' + fmt(r.amplitude[k].imag()) + ',' +
                            fmt(r.abs_on[k]) + ',' + fmt(r.abs_off[k]) + ',' +
                            fmt(r.delta_abs[k]) + '\n';
            break;
        }
        case Observable::PhaseResponse: {
            const auto r = cross_kerr_shift(topo, p.rates, p.drives, s.delta_grid);
            if (topo == Topology::V) {
                for (size_t k = 0; k < r.delta_grid.size(); ++k)
                    out.rows += row_prefix(p) + fmt(r.delta_grid[k]) + ',' +
                                fmt(r.phase_on[k]) + ',' + fmt(r.phase_off[k]) + ',' +
                                fmt(r.delta_phase[k]) + '\n';
            } else {
                const auto m = modified_phase_shift(topo, p.rates, p.drives, s.delta_grid);
                for (size_t k = 0; k < r.delta_grid.size(); ++k)
                    out.rows += row_prefix(p) + fmt(r.delta_grid[k]) + ',' +
                                fmt(r.phase_on[k]) + ',' + fmt(r.phase_off[k]) + ',' +
                                fmt(r.delta_phase[k]) + ',' + fmt(m.delta_phase[k]) + '\n';
            }
            break;
        }
        case Observable::KerrCoefficient: {
            for (double dp : s.delta_grid)
                out.rows += row_prefix(p) + fmt(dp) + ',' +
                            fmt(kerr_coefficient(topo, p.rates, dp)) + '\n';
            break;
        }
        case Observable::KkCheck: {
            const KKGrid& grid = *s.kk_grid;
            const auto exact = sample_exact_response(topo, p.rates, p.drives, grid);
            const unsigned nt = std::max(1u, std::thread::hardware_concurrency());
            const KKResult kkphi = kk_phase_from_amplitude(grid, exact.abs, true, nt);
            const KKResult kkabs = kk_amplitude_from_phase(grid, exact.phase, nt);
            double max_phi = 0.0, rms_phi = 0.0, max_logt = 0.0, rms_logt = 0.0;
            const int n = grid.n_points;
            for (int i = 1; i + 1 < n; ++i) {
                const double dphi = kkphi.values[i] - exact.phase[i];
                const double dlt = std::log(kkabs.values[i]) - std::log(exact.abs[i]);
                max_phi = std::max(max_phi, std::abs(dphi));
                max_logt = std::max(max_logt, std::abs(dlt));
                rms_phi += dphi * dphi;
                rms_logt += dlt * dlt;
            }
            rms_phi = std::sqrt(rms_phi / (n - 2));
            rms_logt = std::sqrt(rms_logt / (n - 2));
            out.rows = row_prefix(p) + fmt(max_phi) + ',' + fmt(rms_phi) + ',' +
                       fmt(max_logt) + ',' + fmt(rms_logt) + ',' +
                       std::to_string(kkphi.floored_indices.size()) + '\n';
            break;
        }
        }
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

inline std::string header_for(const Scenario& s, Topology topo, Observable obs)
{
    std::string h;
    for (const auto& a : s.axes)
        h += a.variable + ',';
    switch (obs) {
    case Observable::Transport: h += "t_probe,r_probe,t_drive,r_drive"; break;
    case Observable::EtaC: h += "eta_c"; break;
    case Observable::EtaCApprox: h += "eta_c_approx"; break;
    case Observable::EtaInc: h += "eta_inc"; break;
    case Observable::EtaIncApprox: h += "eta_inc_approx"; break;
    case Observable::EtaTotal: h += "eta_total"; break;
    case Observable::G2Zero: h += "g2_zero"; break;
    case Observable::G2Curve: h += "tau,g2"; break;
    case Observable::AmplitudeResponse: h += "delta_p,t_re,t_im,t_abs,t_abs_off,delta_t_abs"; break;
    case Observable::PhaseResponse:
        h += (topo == Topology::V) ? "delta_p,phi,phi_off,delta_phi"
                                   : "delta_p,phi,phi_off,delta_phi,delta_phi_mod";
        break;
    case Observable::KerrCoefficient: h += "delta_p,kerr_coefficient"; break;
    case Observable::KkCheck: h += "max_dev_phi,rms_dev_phi,max_dev_logt,rms_dev_logt,n_floored"; break;
    }
    h += '\n';
    return h;
}

inline int value_column_count(Topology topo, Observable obs)
{
    switch (obs) {
    case Observable::Transport: return 4;
    case Observable::G2Curve: return 2;
    case Observable::AmplitudeResponse: return 6;
    case Observable::PhaseResponse: return topo == Topology::V ? 4 : 5;
    case Observable::KerrCoefficient: return 2;
    case Observable::KkCheck: return 5;
    default: return 1;
    }
}

} // namespace detail

inline RunReport run_scenario(const Scenario& s, const RunOptions& opts)
{
    validate_scenario(s);
    std::filesystem::create_directories(opts.out_dir);

    const auto points = detail::expand_points(s);
    RunReport report;
    std::string error_log;

    for (Topology topo : s.topologies) {
        for (Observable obs : s.observables) {
            std::vector<detail::PointOutput> results(points.size());
            const unsigned jobs = std::max(1u, opts.jobs);
            if (jobs == 1 || points.size() == 1) {
                for (size_t i = 0; i < points.size(); ++i)
                    results[i] = detail::evaluate_point(s, topo, obs, points[i]);
            } else {
                std::atomic<size_t> next{0};
                auto worker = [&]() {
                    for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                        results[i] = detail::evaluate_point(s, topo, obs, points[i]);
                };
                std::vector<std::thread> pool;
                for (unsigned t = 0; t < jobs; ++t)
                    pool.emplace_back(worker);
                for (auto& t : pool)
                    t.join();
            }

            const auto path = opts.out_dir /
                              (s.name + "_" + std::string(topology_name(topo)) + "_" +
                               observable_name(obs) + ".csv");
            std::ofstream out(path, std::ios::binary);
            out << detail::header_for(s, topo, obs);
            for (size_t i = 0; i < points.size(); ++i) {
                if (results[i].error.empty()) {
                    out << results[i].rows;
                } else {
                    out << detail::blank_row(points[i], detail::value_column_count(topo, obs));
                    ++report.failed_points;
                    error_log += path.filename().string() + ",point " + std::to_string(i) +
                                 "," + results[i].error + '\n';
                }
            }
            report.files.push_back(path);
        }
    }

    if (!error_log.empty()) {
        const auto epath = opts.out_dir / (s.name + "_errors.txt");
        std::ofstream out(epath, std::ios::binary);
        out << error_log;
        report.files.push_back(epath);
    }

    if (opts.emit_plots) {
        const auto ppath = opts.out_dir / (s.name + "_plot.py");
        std::ofstream out(ppath, std::ios::binary);
        out << "#!/usr/bin/env python3\n"
               "\"\"\"Plot every CSV emitted by scenario '" << s.name << "'.\"\"\"\n"
               "import glob\n"
               "import os\n"
               "import matplotlib\n"
               "matplotlib.use(\"Agg\")\n"
               "import matplotlib.pyplot as plt\n"
               "import numpy as np\n\n"
               "here = os.path.dirname(os.path.abspath(__file__))\n"
               "for path in sorted(glob.glob(os.path.join(here, \"" << s.name << "_*.csv\"))):\n"
               "    names = open(path).readline().strip().split(\",\")\n"
               "    data = np.genfromtxt(path, delimiter=\",\", skip_header=1)\n"
               "    if data.ndim == 1:\n"
               "        data = data.reshape(1, -1)\n"
               "    x = data[:, -2] if data.shape[1] >= 2 else np.arange(len(data))\n"
               "    fig, ax = plt.subplots()\n"
               "    ax.plot(x, data[:, -1], \".\", ms=2)\n"
               "    ax.set_xlabel(names[-2] if len(names) >= 2 else \"index\")\n"
               "    ax.set_ylabel(names[-1])\n"
               "    ax.set_title(os.path.basename(path))\n"
               "    fig.savefig(path.replace(\".csv\", \".png\"), dpi=150)\n"
               "    plt.close(fig)\n";
        report.files.push_back(ppath);
    }
    return report;
}

} // namespace waveqed

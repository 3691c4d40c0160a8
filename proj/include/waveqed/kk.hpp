#pragma once

// Numerical Kramers-Kronig transform between the log-amplitude and the phase
// of the probe transmission, as singularity-subtracted principal-value
// quadrature on a uniform detuning grid:
//
//   P int f(x')/(x'-x) dx' = int (f(x')-f(x))/(x'-x) dx' + f(x) log((b-x)/(x-a))
//
// with trapezoidal integration of the regularized integrand. No extrapolation
// beyond the grid; the endpoint-decay precondition bounds the tail.

#include <cmath>
#include <span>
#include <thread>
#include <vector>

#include "waveqed/errors.hpp"

namespace waveqed {

struct KKGrid {
    double half_width = 0.0;
    int n_points = 0;

    KKGrid(double hw, int n) : half_width(hw), n_points(n)
    {
        if (!(hw > 0.0))
            throw Error("KKGrid: half_width must be positive");
        if (n < 4001 || n % 2 == 0)
            throw Error("KKGrid: n_points must be odd and >= 4001");
    }

    double spacing() const { return 2.0 * half_width / (n_points - 1); }
    double point(int i) const { return -half_width + i * spacing(); }

    // Grid extent must dominate every composite linewidth of the response.
    void validate_extent(double largest_linewidth) const
    {
        if (half_width < 200.0 * largest_linewidth)
            throw GridTooNarrow("KK grid narrower than 200 x largest linewidth");
    }
};

struct KKResult {
    std::vector<double> values;
    std::vector<int> floored_indices; // points clamped by the amplitude floor
};

namespace detail {

constexpr double kAmplitudeFloor = 1e-12;
constexpr double kEndpointDecay = 1e-3;
// A 1/x input tail truncated at the grid edge shifts the output by about
// 2 f(end) / pi, so capping |f(end)| at (pi/2) 1e-3 keeps the neglected tail
// below 1e-3. Phase curves carry the universal -2 Gamma_p / Delta wing and
// need this absolute form; log-amplitude decays like 1/Delta^2 and the
// relative form suffices.
constexpr double kEndpointAbsCap = M_PI / 2.0 * 1e-3;

inline void check_endpoint_decay(std::span<const double> f, double abs_cap = 0.0)
{
    double fmax = 0.0;
    for (double v : f)
        fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0)
        return;
    const double bound = std::max(kEndpointDecay * fmax, abs_cap);
    if (std::abs(f.front()) >= bound || std::abs(f.back()) >= bound)
        throw GridTooNarrow("KK input does not decay at the grid ends");
}

// sign/pi * PV integral of f/(x'-x) at every grid node.
inline std::vector<double> pv_transform(const KKGrid& grid, std::span<const double> f,
                                        double sign, unsigned n_threads)
{
    const int n = grid.n_points;
    const double h = grid.spacing();
    std::vector<double> recip(n, 0.0); // recip[k] = 1/(k h)
    for (int k = 1; k < n; ++k)
        recip[k] = 1.0 / (k * h);

    std::vector<double> out(n);
    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const double fi = f[i];
            double s = 0.0;
            for (int j = 0; j < i; ++j)
                s -= (f[j] - fi) * recip[i - j];
            for (int j = i + 1; j < n; ++j)
                s += (f[j] - fi) * recip[j - i];
            // trapezoid endpoint weights
            if (i != 0)
                s -= 0.5 * (f[0] - fi) * (-recip[i]);
            if (i != n - 1)
                s -= 0.5 * (f[n - 1] - fi) * recip[n - 1 - i];
            // regularized integrand at the singular node: f'(x_i)
            double deriv;
            if (i == 0)
                deriv = (f[1] - f[0]) / h;
            else if (i == n - 1)
                deriv = (f[n - 1] - f[n - 2]) / h;
            else
                deriv = (f[i + 1] - f[i - 1]) / (2.0 * h);
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            s += w * deriv;

            double val = h * s;
            if (i != 0 && i != n - 1)
                val += fi * std::log(double(n - 1 - i) / double(i));
            out[i] = sign / M_PI * val;
        }
    };

    if (n_threads <= 1) {
        worker(0, n);
        return out;
    }
    std::vector<std::thread> pool;
    const int chunk = (n + int(n_threads) - 1) / int(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        const int b = int(t) * chunk;
        const int e = std::min(n, b + chunk);
        if (b < e)
            pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool)
        th.join();
    return out;
}

} // namespace detail

// Phase from amplitude: phi(D) = -(1/pi) P int log|t(D')| / (D'-D) dD'.
// |t| is clamped at 1e-12 before the log when allow_floor is set; clamped
// points are reported in the result metadata.
inline KKResult kk_phase_from_amplitude(const KKGrid& grid, std::span<const double> abs_t,
                                        bool allow_floor = true,
                                        unsigned n_threads = std::thread::hardware_concurrency())
{
    if (int(abs_t.size()) != grid.n_points)
        throw Error("kk_phase_from_amplitude: curve size does not match grid");
    KKResult res;
    std::vector<double> logt(abs_t.size());
    for (size_t i = 0; i < abs_t.size(); ++i) {
        double a = abs_t[i];
        if (a <= detail::kAmplitudeFloor) {
            if (!allow_floor)
                throw NonPositiveAmplitude("|t| at or below the amplitude floor");
            a = detail::kAmplitudeFloor;
            res.floored_indices.push_back(int(i));
        }
        logt[i] = std::log(a);
    }
    detail::check_endpoint_decay(logt);
    res.values = detail::pv_transform(grid, logt, -1.0, n_threads);
    return res;
}

// Amplitude from phase: log|t(D)| = +(1/pi) P int phi(D') / (D'-D) dD'.
inline KKResult kk_amplitude_from_phase(const KKGrid& grid, std::span<const double> phase,
                                        unsigned n_threads = std::thread::hardware_concurrency())
{
    if (int(phase.size()) != grid.n_points)
        throw Error("kk_amplitude_from_phase: curve size does not match grid");
    detail::check_endpoint_decay(phase, detail::kEndpointAbsCap);
    KKResult res;
    res.values = detail::pv_transform(grid, phase, 1.0, n_threads);
    for (double& v : res.values)
        v = std::exp(v);
    return res;
}

} // namespace waveqed

#pragma once

// Complex probe-transmission amplitude, phase responses (standard and
// modified definitions), linear and weak-probe approximate susceptibilities,
// and cross-Kerr coefficients for all three topologies.

#include <cmath>
#include <span>
#include <vector>

#include "waveqed/dynamics.hpp"
#include "waveqed/model.hpp"

namespace waveqed {

struct ComplexTransmission {
    cplx amplitude; // t = 1 + 2i chi
    cplx chi;
};

// t = 1 + (2i Gamma_p / Omega_p) <zeta+> in the probe frame. The dressed
// <zeta+> is slot 2 (M*) for Lambda and slot 6 (S*) for V/ladder.
inline ComplexTransmission transmission_amplitude(const EmitterSystem& sys, const Vec8& m)
{
    if (sys.drives.omega_p <= 0.0)
        throw UndefinedCoefficient("transmission amplitude needs omega_p > 0");
    const cplx zdag = (sys.topology == Topology::Lambda) ? m(2) : m(6);
    const cplx chi = sys.rates.gamma_p / sys.drives.omega_p * zdag;
    return {cplx(1.0) + 2.0 * cplx(0.0, 1.0) * chi, chi};
}

// Steady-state susceptibility for a given parameter point.
inline cplx susceptibility(Topology t, const RateSet& g, DriveSet d, double delta_p)
{
    d.delta_p = delta_p;
    const EmitterSystem sys = build_system(t, g, d);
    return transmission_amplitude(sys, steady_state(sys)).chi;
}

// Phase of t = 1 + 2i chi. atan2 extends the single-branch arctan formula to
// Re(t) < 0, which V/ladder responses reach near resonance.
inline double phase(cplx chi)
{
    const double y = 2.0 * chi.real();
    const double x = 1.0 - 2.0 * chi.imag();
    if (x == 0.0 && y == 0.0)
        throw UndefinedPhase("phase undefined at t = 0");
    return std::atan2(y, x);
}

inline double amplitude_abs(cplx chi)
{
    return std::abs(cplx(1.0) + 2.0 * cplx(0.0, 1.0) * chi);
}

// Remove 2 pi jumps along a sampled curve (principal value kept at the first
// point, assumed far-detuned).
inline std::vector<double> unwrap_phase(std::span<const double> raw)
{
    std::vector<double> out(raw.begin(), raw.end());
    for (size_t k = 1; k < out.size(); ++k) {
        double d = out[k] - out[k - 1];
        d -= 2.0 * M_PI * std::round(d / (2.0 * M_PI));
        out[k] = out[k - 1] + d;
    }
    return out;
}

// Linear susceptibilities. Lambda keeps the beam-ratio term through
// I_p/I_d = (Omega_p^2 Gamma_d) / (Omega_d^2 Gamma_p); V and ladder share the
// two-level form with the primed width.
inline cplx linear_susceptibility(Topology t, const RateSet& g, const DriveSet& d,
                                  double delta_p)
{
    const cplx I(0.0, 1.0);
    if (t == Topology::Lambda) {
        const double g31 = g.width_31();
        const double g32 = g.width_32();
        double bracket;
        if (d.omega_d <= 0.0) {
            bracket = 0.0; // I_p/I_d -> infinity: probe decoupled
        } else {
            const double q = d.omega_p * d.omega_p * g.gamma_d /
                             (d.omega_d * d.omega_d * g.gamma_p);
            const double base = g32 * g32 + delta_p * delta_p;
            bracket = base / (base + g31 * g32 * q);
        }
        return -g.gamma_p / (delta_p + I * g32) * bracket;
    }
    return -g.gamma_p / (delta_p + I * g.width_21p());
}

// Weak-probe (Omega_p -> 0) susceptibilities at finite drive.
inline cplx approx_susceptibility(Topology t, const RateSet& g, const DriveSet& d,
                                  double delta_p)
{
    const cplx I(0.0, 1.0);
    const double od2 = d.omega_d * d.omega_d;
    switch (t) {
    case Topology::Lambda: {
        const double g21 = g.width_21();
        const double g32 = g.width_32();
        const cplx bracket =
            1.0 - od2 / (od2 - (delta_p + I * g21) * (delta_p + I * g32));
        return -g.gamma_p / (delta_p + I * g32) * bracket;
    }
    case Topology::Ladder: {
        const cplx chil = -g.gamma_p / (delta_p + I * g.width_21p());
        const cplx bracket =
            1.0 - od2 / (od2 - (delta_p + I * g.width_21p()) * (delta_p + I * g.width_31p()));
        return chil * bracket;
    }
    default: {
        // second denominator factor carries the opposite sign from the
        // Lambda/ladder forms; fixed against the exact Omega_p -> 0 limit
        const cplx chil = -g.gamma_p / (delta_p + I * g.width_21p());
        const cplx num =
            od2 * ((delta_p + I * g.width_21p() + 2.0 * I * g.gamma_d) *
                       (delta_p + I * g.width_32p()) -
                   2.0 * od2);
        const cplx den =
            2.0 * (od2 + g.gamma_d * g.width_31p()) *
            ((delta_p + I * g.width_21p()) * (delta_p + I * g.width_32p()) - od2);
        return chil * (1.0 - num / den);
    }
    }
}

// Small-drive Kerr coefficients, Delta_phi ~= k_X Omega_d^2 (the Lambda one
// applies to the modified phase shift). Valid for Omega_p << Omega_d < rates.
inline double kerr_coefficient(Topology t, const RateSet& g, double delta_p)
{
    const double d2 = delta_p * delta_p;
    switch (t) {
    case Topology::Lambda: {
        const double g21 = g.width_21(), g32 = g.width_32();
        const double w = g32 - 2.0 * g.gamma_p;
        const double num =
            2.0 * g.gamma_p * delta_p * (g21 * g32 + (g21 + g32) * w - d2);
        const double den =
            (g21 * g21 + d2) * (g32 * g32 + d2) * (w * w + d2);
        return num / den;
    }
    case Topology::V: {
        const double g21 = g.width_21p(), g31 = g.width_31p();
        const double w = g21 - 2.0 * g.gamma_p;
        const double num = g.gamma_p * delta_p *
                           (g21 * g21 + 4.0 * g.gamma_d * (g21 - g.gamma_p) + d2);
        const double den =
            g31 * g.gamma_d * (g21 * g21 + d2) * (w * w + d2);
        return num / den;
    }
    default: {
        const double g21 = g.width_21p(), g31 = g.width_31p();
        const double w = g21 - 2.0 * g.gamma_p;
        const double num =
            2.0 * g.gamma_p * delta_p * (g21 * g31 + (g21 + g31) * w - d2);
        const double den =
            (g21 * g21 + d2) * (g31 * g31 + d2) * (w * w + d2);
        return num / den;
    }
    }
}

// Amplitude/phase response of the probe, with the drive-off reference curves.
struct ProbeResponse {
    std::vector<double> delta_grid;
    std::vector<cplx> amplitude;      // t with drive on
    std::vector<double> abs_on;       // |t| with drive on
    std::vector<double> abs_off;      // |t| with drive off
    std::vector<double> phase_on;     // unwrapped
    std::vector<double> phase_off;    // unwrapped
    std::vector<double> delta_abs;    // |t|_on - |t|_off
    std::vector<double> delta_phase;  // phi_on - phi_off
};

inline ProbeResponse cross_kerr_shift(Topology t, const RateSet& g, const DriveSet& d,
                                      std::span<const double> delta_grid)
{
    ProbeResponse r;
    r.delta_grid.assign(delta_grid.begin(), delta_grid.end());
    const size_t n = r.delta_grid.size();
    std::vector<double> phon(n), phoff(n);
    r.amplitude.resize(n);
    r.abs_on.resize(n);
    r.abs_off.resize(n);
    DriveSet off = d;
    off.omega_d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const cplx chi_on = susceptibility(t, g, d, r.delta_grid[i]);
        const cplx chi_off = susceptibility(t, g, off, r.delta_grid[i]);
        r.amplitude[i] = cplx(1.0) + 2.0 * cplx(0.0, 1.0) * chi_on;
        r.abs_on[i] = std::abs(r.amplitude[i]);
        r.abs_off[i] = amplitude_abs(chi_off);
        phon[i] = phase(chi_on);
        phoff[i] = phase(chi_off);
    }
    r.phase_on = unwrap_phase(phon);
    r.phase_off = unwrap_phase(phoff);
    r.delta_abs.resize(n);
    r.delta_phase.resize(n);
    for (size_t i = 0; i < n; ++i) {
        r.delta_abs[i] = r.abs_on[i] - r.abs_off[i];
        r.delta_phase[i] = r.phase_on[i] - r.phase_off[i];
    }
    return r;
}

// Modified phase response Delta_phi' = phi|on - phi'(chi_l)|on, defined for
// Lambda and ladder. Vanishes at large probe detuning for Lambda, unlike
// Delta_phi.
struct ModifiedPhaseResponse {
    std::vector<double> delta_grid;
    std::vector<double> phase_exact;   // unwrapped, drive on
    std::vector<double> phase_linear;  // unwrapped, from chi_l at same drives
    std::vector<double> delta_phase;   // exact - linear
};

inline ModifiedPhaseResponse modified_phase_shift(Topology t, const RateSet& g,
                                                  const DriveSet& d,
                                                  std::span<const double> delta_grid)
{
    if (t == Topology::V)
        throw UnsupportedTopology("modified phase shift is defined for lambda and ladder");
    ModifiedPhaseResponse r;
    r.delta_grid.assign(delta_grid.begin(), delta_grid.end());
    const size_t n = r.delta_grid.size();
    std::vector<double> pe(n), pl(n);
    for (size_t i = 0; i < n; ++i) {
        pe[i] = phase(susceptibility(t, g, d, r.delta_grid[i]));
        pl[i] = phase(linear_susceptibility(t, g, d, r.delta_grid[i]));
    }
    r.phase_exact = unwrap_phase(pe);
    r.phase_linear = unwrap_phase(pl);
    r.delta_phase.resize(n);
    for (size_t i = 0; i < n; ++i)
        r.delta_phase[i] = r.phase_exact[i] - r.phase_linear[i];
    return r;
}

enum class PhaseShiftKind {
    Standard, // phi|on - phi|off       (V, ladder)
    Modified, // phi|on - phi'(chi_l)   (lambda, ladder)
};

inline PhaseShiftKind natural_shift_kind(Topology t)
{
    return t == Topology::Lambda ? PhaseShiftKind::Modified : PhaseShiftKind::Standard;
}

// Pointwise phase shift with the difference wrapped to (-pi, pi].
inline double phase_shift_at(Topology t, const RateSet& g, const DriveSet& d,
                             double delta_p, PhaseShiftKind kind)
{
    const double pon = phase(susceptibility(t, g, d, delta_p));
    double pref;
    if (kind == PhaseShiftKind::Standard) {
        DriveSet off = d;
        off.omega_d = 0.0;
        pref = phase(susceptibility(t, g, off, delta_p));
    } else {
        pref = phase(linear_susceptibility(t, g, d, delta_p));
    }
    double dp = pon - pref;
    dp -= 2.0 * M_PI * std::round(dp / (2.0 * M_PI));
    return dp;
}

struct PhaseShiftMaximum {
    double delta_p = 0.0;
    double shift = 0.0; // signed value at the |shift| maximum
};

// Probe detuning maximizing |Delta_phi|: grid scan over the window followed by
// golden-section refinement.
inline PhaseShiftMaximum max_abs_phase_shift(Topology t, const RateSet& g, const DriveSet& d,
                                             double window_half_width = 0.0,
                                             PhaseShiftKind kind = PhaseShiftKind::Standard,
                                             int scan_points = 1601)
{
    if (window_half_width <= 0.0) {
        const double lw = std::max({g.width_32(), g.width_32p(), g.width_21p(), g.width_31p()});
        window_half_width = 20.0 * lw;
    }
    auto val = [&](double dp) { return std::abs(phase_shift_at(t, g, d, dp, kind)); };

    double best_x = 0.0, best = -1.0;
    const double h = 2.0 * window_half_width / (scan_points - 1);
    for (int i = 0; i < scan_points; ++i) {
        const double x = -window_half_width + i * h;
        const double v = val(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double a = best_x - h, b = best_x + h;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * window_half_width; ++it) {
        if (f1 > f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = val(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = val(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, phase_shift_at(t, g, d, xm, kind)};
}

} // namespace waveqed

#pragma once

// Three-level emitter in a 1D waveguide, driven by a coherent probe and drive
// beam. This header defines the physical parameter sets and builds the 8x8
// evolution matrix R and drive vector W of the expectation-value equations
//
//     dM/dt = R M + W
//
// for the Lambda, V and ladder (Xi) coupling configurations.
//
// Slot convention (identical operator pattern for all three topologies, only
// the rotating-frame dressing differs):
//
//   index  0     1    2     3        4        5    6     7
//   op     nu+   sg   mu+   nu nu+   sg sg+   mu   sg+   nu
//
// with sg = |1><2|, mu = |2><3|, nu = |3><1|. Slots (0,7), (1,6), (2,5) hold
// mutually conjugate expectations; slots 3 and 4 are the populations P3 and P1
// and stay real. Each slot expectation is taken in a rotating frame
// exp(i(a w_p + b w_d)(t-t0)); the (a,b) pairs per topology are available via
// slot_frame(). All rates and frequencies are dimensionless, in units of the
// reference transition frequency.

#include <array>
#include <cmath>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "waveqed/errors.hpp"

namespace waveqed {

using cplx = std::complex<double>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;

enum class Topology { Lambda, V, Ladder };

constexpr std::string_view topology_name(Topology t)
{
    switch (t) {
    case Topology::Lambda: return "lambda";
    case Topology::V: return "v";
    case Topology::Ladder: return "ladder";
    }
    return "?";
}

// Relaxation rates. gamma_p / gamma_d: per-direction waveguide coupling of the
// probe / drive transition. gamma_nr: non-radiative decay on the third
// transition. gamma_l2 / gamma_l3: pure dephasing of levels |2> and |3>.
struct RateSet {
    double gamma_p = 0.0;
    double gamma_d = 0.0;
    double gamma_nr = 0.0;
    double gamma_l2 = 0.0;
    double gamma_l3 = 0.0;

    // Gamma~ = 2(Gamma_p + Gamma_d), total waveguide relaxation.
    double gamma_tilde() const { return 2.0 * (gamma_p + gamma_d); }
    // Gamma_t = Gamma~ + Gamma_gamma.
    double gamma_t() const { return gamma_tilde() + gamma_nr; }

    // Composite linewidths of the linear-response formulas.
    // Unprimed set (Lambda): Gamma_31 = Gamma~ + Gl3, Gamma_21 = Gl2.
    double width_31() const { return gamma_tilde() + gamma_l3; }
    double width_21() const { return gamma_l2; }
    double width_32() const { return width_31() + width_21(); }
    // Primed set (V / ladder): Gamma'_21 = 2Gp + Gl2, Gamma'_31 = 2Gd + Gl3.
    double width_21p() const { return 2.0 * gamma_p + gamma_l2; }
    double width_31p() const { return 2.0 * gamma_d + gamma_l3; }
    double width_32p() const { return width_31p() + width_21p(); }

    bool valid() const
    {
        return gamma_p >= 0 && gamma_d >= 0 && gamma_nr >= 0 &&
               gamma_l2 >= 0 && gamma_l3 >= 0;
    }
};

// Beam parameters: Rabi frequencies and detunings from the respective
// transitions (detuning = transition frequency minus beam frequency).
struct DriveSet {
    double omega_p = 0.0;
    double omega_d = 0.0;
    double delta_p = 0.0;
    double delta_d = 0.0;
};

// <N_p> = Omega_p^2 / (8 Gamma_p^2), average probe photons per interaction time.
inline double probe_photon_number(const RateSet& r, const DriveSet& d)
{
    if (r.gamma_p <= 0.0)
        throw UndefinedCoefficient("probe photon number needs gamma_p > 0");
    const double x = d.omega_p / r.gamma_p;
    return x * x / 8.0;
}

inline double drive_photon_number(const RateSet& r, const DriveSet& d)
{
    if (r.gamma_d <= 0.0)
        throw UndefinedCoefficient("drive photon number needs gamma_d > 0");
    const double x = d.omega_d / r.gamma_d;
    return x * x / 8.0;
}

// Normalized incident fluxes v_g I_p = Omega_p^2 / (2 Gamma_p) and the drive
// analogue. Only these combinations of the microscopic I, v_g are observable.
inline double probe_flux(const RateSet& r, const DriveSet& d)
{
    if (r.gamma_p <= 0.0)
        throw UndefinedCoefficient("probe flux needs gamma_p > 0");
    return d.omega_p * d.omega_p / (2.0 * r.gamma_p);
}

inline double drive_flux(const RateSet& r, const DriveSet& d)
{
    if (r.gamma_d <= 0.0)
        throw UndefinedCoefficient("drive flux needs gamma_d > 0");
    return d.omega_d * d.omega_d / (2.0 * r.gamma_d);
}

// Rabi frequency giving <N> probe (drive) photons per interaction time.
inline double omega_for_photon_number(double gamma, double n)
{
    return std::sqrt(8.0 * n) * gamma;
}

using SlotLabels = std::array<std::string_view, 8>;

inline const SlotLabels& slot_labels(Topology t)
{
    static const SlotLabels lambda = {"N1*", "S1", "M1*", "N2", "S2", "M1", "S1*", "N1"};
    static const SlotLabels v = {"N3*", "S3", "M3*", "N4", "S4", "M3", "S3*", "N3"};
    static const SlotLabels ladder = {"N5*", "S5", "M5*", "N6", "S6", "M5", "S5*", "N5"};
    switch (t) {
    case Topology::Lambda: return lambda;
    case Topology::V: return v;
    default: return ladder;
    }
}

// Rotating-frame dressing exponents: slot expectation = <op> exp(i(a w_p + b w_d)(t-t0)).
struct FrameExponent {
    int a; // coefficient of omega_p
    int b; // coefficient of omega_d
};

inline std::array<FrameExponent, 8> slot_frame(Topology t)
{
    switch (t) {
    case Topology::Lambda:
        // N1 = <nu> e^{-i wd}, S1 = <sg> e^{i(wd-wp)}, M1 = <mu> e^{i wp}
        return {{{0, 1}, {-1, 1}, {-1, 0}, {0, 0}, {0, 0}, {1, 0}, {1, -1}, {0, -1}}};
    case Topology::V:
        // N3 = <nu> e^{-i wd}, S3 = <sg> e^{i wp}, M3 = <mu> e^{i(wd-wp)}
        return {{{0, 1}, {1, 0}, {1, -1}, {0, 0}, {0, 0}, {-1, 1}, {-1, 0}, {0, -1}}};
    default:
        // N5 = <nu> e^{-i(wd+wp)}, S5 = <sg> e^{i wp}, M5 = <mu> e^{i wd}
        return {{{1, 1}, {1, 0}, {0, -1}, {0, 0}, {0, 0}, {0, 1}, {-1, 0}, {-1, -1}}};
    }
}

// Conjugate slot pairing: (0,7), (1,6), (2,5); populations 3, 4 self-paired.
constexpr int conjugate_slot(int i)
{
    constexpr int map[8] = {7, 6, 5, 3, 4, 2, 1, 0};
    return map[i];
}

// Topology + evolution matrix R + drive vector W. Immutable after construction.
struct EmitterSystem {
    Topology topology = Topology::Lambda;
    RateSet rates;
    DriveSet drives;
    Mat8 r = Mat8::Zero();
    Vec8 omega = Vec8::Zero();

    const SlotLabels& labels() const { return slot_labels(topology); }
};

namespace detail {

// Pure-dephasing augmentation: -Gl2 on the diagonal of every coherence slot
// involving level |2>, -Gl3 for level |3>, population slots untouched. This
// is the unique diagonal augmentation reproducing the known linear
// susceptibility widths (width_32 for Lambda, width_21p for V/ladder).
inline std::array<double, 8> dephasing_diagonal(const RateSet& g)
{
    const double l2 = g.gamma_l2, l3 = g.gamma_l3;
    // slots: nu+ sg mu+ P3 P1 mu sg+ nu ; nu ~ |3><1|, sg ~ |1><2|, mu ~ |2><3|
    return {l3, l2, l2 + l3, 0.0, 0.0, l2 + l3, l2, l3};
}

inline EmitterSystem build_lambda(const RateSet& g, const DriveSet& d)
{
    const cplx I(0.0, 1.0);
    const double gt = g.gamma_tilde();
    const cplx k1 = -I * d.delta_d - gt;
    const cplx k2 = -I * d.delta_p - gt - g.gamma_nr;
    const cplx k3 = k2 - k1;
    const cplx iOp = I * d.omega_p;
    const cplx iOd = I * d.omega_d;

    EmitterSystem s;
    s.topology = Topology::Lambda;
    s.rates = g;
    s.drives = d;
    Mat8& R = s.r;
    R << k1, -iOp, 0, iOd, -iOd, 0, 0, 0,
        -iOp, std::conj(k3), iOd, 0, 0, 0, 0, 0,
        0, iOd, std::conj(k2), -2.0 * iOp, -iOp, 0, 0, 0,
        iOd, 0, -iOp, -2.0 * gt, 0, iOp, 0, -iOd,
        -iOd, 0, 0, 4.0 * g.gamma_d - 2.0 * g.gamma_nr, -2.0 * g.gamma_nr, 0, 0, iOd,
        0, 0, 0, 2.0 * iOp, iOp, k2, -iOd, 0,
        0, 0, 0, 0, 0, -iOd, k3, iOp,
        0, 0, 0, -iOd, iOd, 0, iOp, std::conj(k1);
    s.omega << 0, 0, iOp, 0, 2.0 * g.gamma_nr, -iOp, 0, 0;
    return s;
}

inline EmitterSystem build_v(const RateSet& g, const DriveSet& d)
{
    const cplx I(0.0, 1.0);
    const cplx k4 = -I * d.delta_d - g.gamma_nr - 2.0 * g.gamma_d;
    const cplx k5 = -I * d.delta_p - 2.0 * g.gamma_p;
    const cplx k6 = std::conj(k4) + k5;
    const cplx iOp = I * d.omega_p;
    const cplx iOd = I * d.omega_d;

    EmitterSystem s;
    s.topology = Topology::V;
    s.rates = g;
    s.drives = d;
    Mat8& R = s.r;
    R << k4, 0, 0, iOd, -iOd, iOp, 0, 0,
        0, k5, iOd, -iOp, -2.0 * iOp, 0, 0, 0,
        0, iOd, k6, 0, 0, 0, 0, -iOp,
        iOd, 0, 0, -4.0 * g.gamma_d - 2.0 * g.gamma_nr, 0, 0, 0, -iOd,
        -iOd, -iOp, 0, 4.0 * g.gamma_d - 4.0 * g.gamma_p, -4.0 * g.gamma_p, 0, iOp, iOd,
        iOp, 0, 0, 0, 0, std::conj(k6), -iOd, 0,
        0, 0, 0, iOp, 2.0 * iOp, -iOd, std::conj(k5), 0,
        0, 0, -iOp, -iOd, iOd, 0, 0, std::conj(k4);
    s.omega << 0, iOp, 0, 0, 4.0 * g.gamma_p, 0, -iOp, 0;
    return s;
}

inline EmitterSystem build_ladder(const RateSet& g, const DriveSet& d)
{
    const cplx I(0.0, 1.0);
    const double gt = g.gamma_tilde();
    const cplx k7 = -I * d.delta_d - gt;
    const cplx k5 = -I * d.delta_p - 2.0 * g.gamma_p;
    const cplx k8 = k7 - std::conj(k5);
    const cplx iOp = I * d.omega_p;
    const cplx iOd = I * d.omega_d;

    EmitterSystem s;
    s.topology = Topology::Ladder;
    s.rates = g;
    s.drives = d;
    Mat8& R = s.r;
    R << k8, -iOd, 0, 0, 0, iOp, 0, 0,
        -iOd, k5, 0, -iOp, -2.0 * iOp, 0, 0, 0,
        0, 0, std::conj(k7), -2.0 * iOd, -iOd, 0, 0, -iOp,
        0, 0, -iOd, -4.0 * g.gamma_d - 2.0 * g.gamma_nr, 0, iOd, 0, 0,
        0, -iOp, 0, 2.0 * g.gamma_nr - 4.0 * g.gamma_p, -4.0 * g.gamma_p, 0, iOp, 0,
        iOp, 0, 0, 2.0 * iOd, iOd, k7, 0, 0,
        0, 0, 0, iOp, 2.0 * iOp, 0, std::conj(k5), iOd,
        0, 0, -iOp, 0, 0, 0, iOd, std::conj(k8);
    s.omega << 0, iOp, iOd, 0, 4.0 * g.gamma_p, -iOd, -iOp, 0;
    return s;
}

} // namespace detail

inline EmitterSystem build_system(Topology t, const RateSet& rates, const DriveSet& drives)
{
    EmitterSystem s;
    switch (t) {
    case Topology::Lambda: s = detail::build_lambda(rates, drives); break;
    case Topology::V: s = detail::build_v(rates, drives); break;
    case Topology::Ladder: s = detail::build_ladder(rates, drives); break;
    }
    const auto deph = detail::dephasing_diagonal(rates);
    for (int i = 0; i < 8; ++i)
        s.r(i, i) -= deph[i];
    return s;
}

// Lambda emitter with a classically modeled drive beam: every Gamma_d-origin
// relaxation term removed (Gamma_d = 0, Omega_d retained).
inline EmitterSystem classical_drive_system(const RateSet& rates, const DriveSet& drives)
{
    RateSet g = rates;
    g.gamma_d = 0.0;
    return build_system(Topology::Lambda, g, drives);
}

// Emitter initially in the ground state |1>: the sg sg+ slot (P1) is 1.
inline Vec8 initial_state(Topology)
{
    Vec8 m = Vec8::Zero();
    m(4) = 1.0;
    return m;
}

} // namespace waveqed

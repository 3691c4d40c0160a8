#pragma once

// Transport coefficients, coherent/incoherent amplification (exact and
// approximate), extremal-drive analysis, and the intensity correlation
// g2(tau) of transmitted probe photons.

#include <cmath>
#include <span>
#include <vector>

#include "waveqed/dynamics.hpp"
#include "waveqed/model.hpp"

namespace waveqed {

struct BeamTransport {
    double transmission = 0.0;
    double reflection = 0.0;
};

struct TransportCoefficients {
    double t_probe = 0.0;
    double r_probe = 0.0;
    double t_drive = 0.0;
    double r_drive = 0.0;
};

// T_p, R_p from the tracked state. Lambda: T_p = 1 + (4Gp^2/Op^2) N2
// + (4Gp/Op) Im M1, R_p = (4Gp^2/Op^2) N2. V/ladder: the excited probe level
// population is 1 - P3 - P1 and the coherence slot is S* (slot 6).
inline BeamTransport probe_transport(const EmitterSystem& sys, const Vec8& m)
{
    const double gp = sys.rates.gamma_p;
    const double op = sys.drives.omega_p;
    if (op <= 0.0)
        throw UndefinedCoefficient("probe transport needs omega_p > 0");
    const double c2 = 4.0 * gp * gp / (op * op);
    const double c1 = 4.0 * gp / op;
    BeamTransport tr;
    if (sys.topology == Topology::Lambda) {
        const double n2 = m(3).real();
        tr.reflection = c2 * n2;
        tr.transmission = 1.0 + c2 * n2 + c1 * m(5).imag();
    } else {
        const double p2 = 1.0 - m(3).real() - m(4).real();
        tr.reflection = c2 * p2;
        tr.transmission = 1.0 + c2 * p2 - c1 * m(6).imag();
    }
    return tr;
}

inline BeamTransport drive_transport(const EmitterSystem& sys, const Vec8& m)
{
    const double gd = sys.rates.gamma_d;
    const double od = sys.drives.omega_d;
    if (od <= 0.0)
        throw UndefinedCoefficient("drive transport needs omega_d > 0");
    const double c2 = 4.0 * gd * gd / (od * od);
    const double c1 = 4.0 * gd / od;
    const double n = m(3).real(); // <nu nu+> = P3 in all three topologies
    BeamTransport tr;
    tr.reflection = c2 * n;
    switch (sys.topology) {
    case Topology::Lambda:
        tr.transmission = 1.0 + c2 * n - c1 * m(7).imag();
        break;
    case Topology::V:
        tr.transmission = 1.0 + c2 * n - c1 * m(7).imag();
        break;
    case Topology::Ladder:
        // drive coherence enters as Im[M5*] = slot 2
        tr.transmission = 1.0 + c2 * n - c1 * m(2).imag();
        break;
    }
    return tr;
}

inline TransportCoefficients transport(const EmitterSystem& sys, const Vec8& m)
{
    const auto p = probe_transport(sys, m);
    const auto d = drive_transport(sys, m);
    return {p.transmission, p.reflection, d.transmission, d.reflection};
}

namespace detail {

inline void require_amplifying(Topology t, const char* what)
{
    if (t == Topology::Ladder)
        throw UnsupportedTopology(std::string(what) + " is not defined for a ladder emitter");
}

} // namespace detail

// eta_c = 2(Gp |z|^2 + Op Im z) / (v_g I_p), z the probe coherence slot
// (M1 for Lambda, S3 for V).
inline double coherent_amplification(const EmitterSystem& sys, const Vec8& m)
{
    detail::require_amplifying(sys.topology, "coherent amplification");
    const double gp = sys.rates.gamma_p;
    const double op = sys.drives.omega_p;
    if (op <= 0.0)
        throw UndefinedCoefficient("coherent amplification needs omega_p > 0");
    const cplx z = (sys.topology == Topology::Lambda) ? m(5) : m(1);
    const double c2 = 4.0 * gp * gp / (op * op);
    const double c1 = 4.0 * gp / op;
    return c2 * std::norm(z) + c1 * z.imag();
}

// eta_inc = eta_T - eta_c, evaluated from the state directly.
inline double incoherent_amplification(const EmitterSystem& sys, const Vec8& m)
{
    detail::require_amplifying(sys.topology, "incoherent amplification");
    const double gp = sys.rates.gamma_p;
    const double op = sys.drives.omega_p;
    if (op <= 0.0)
        throw UndefinedCoefficient("incoherent amplification needs omega_p > 0");
    const double c2 = 4.0 * gp * gp / (op * op);
    if (sys.topology == Topology::Lambda)
        return c2 * (m(3).real() - std::norm(m(5)));
    return c2 * (1.0 - m(3).real() - m(4).real() - std::norm(m(1)));
}

inline double total_amplification(const EmitterSystem& sys, const Vec8& m)
{
    return probe_transport(sys, m).transmission - 1.0;
}

// Weak-probe resonant approximations eta_c ~= 4 eta0 (eta0 + 1).
inline double eta0_lambda(const RateSet& g, double omega_d)
{
    const double gt = g.gamma_tilde();
    const double gg = g.gamma_nr;
    const double gtot = g.gamma_t();
    const double od2 = omega_d * omega_d;
    const double num = g.gamma_p * gg * od2 * (2.0 * g.gamma_d + gg);
    const double den = (od2 + gtot * gg) * (gt * gt * gg + 2.0 * od2 * (gg + g.gamma_p));
    return den > 0.0 ? num / den : 0.0;
}

inline double eta0_v(const RateSet& g, double omega_d)
{
    const double gg = g.gamma_nr;
    const double gtot = g.gamma_t();
    const double gp = g.gamma_p;
    const double w = 2.0 * g.gamma_d + gg;
    const double od2 = omega_d * omega_d;
    const double num = gp * (gtot * (gg * od2 - 2.0 * gp * w * w) - 4.0 * gp * gp * od2);
    const double den = (2.0 * gp * gtot + od2) * (2.0 * gp * w * w + od2 * (gg + 4.0 * gp));
    return den > 0.0 ? num / den : 0.0;
}

inline double coherent_amplification_approx(Topology t, const RateSet& g, const DriveSet& d)
{
    detail::require_amplifying(t, "coherent amplification");
    const double e0 = (t == Topology::Lambda) ? eta0_lambda(g, d.omega_d) : eta0_v(g, d.omega_d);
    return 4.0 * e0 * (e0 + 1.0);
}

// Strong-drive / weak-probe incoherent amplification formulas. Both carry
// 1/(v_g I_p) = 2 Gamma_p / Omega_p^2.
inline double incoherent_amplification_approx(Topology t, const RateSet& g, const DriveSet& d)
{
    detail::require_amplifying(t, "incoherent amplification");
    if (g.gamma_p <= 0.0 || d.omega_p <= 0.0)
        throw UndefinedCoefficient("incoherent amplification needs gamma_p, omega_p > 0");
    const double inv_flux = 2.0 * g.gamma_p / (d.omega_p * d.omega_p);
    const double gg = g.gamma_nr;
    const double od2 = d.omega_d * d.omega_d;
    if (t == Topology::Lambda) {
        const double gt = g.gamma_tilde();
        const double den = gg * (gt * gt + d.delta_d * d.delta_d) + 2.0 * od2 * (g.gamma_p + gg);
        return den > 0.0 ? inv_flux * 2.0 * g.gamma_p * gg * od2 / den : 0.0;
    }
    const double w = gg + 2.0 * g.gamma_d;
    const double den = 2.0 * g.gamma_p * (w * w + d.delta_d * d.delta_d) + od2 * (4.0 * g.gamma_p + gg);
    return den > 0.0 ? inv_flux * 2.0 * g.gamma_p * gg * od2 / den : 0.0;
}

// Drive Rabi frequency maximizing the resonant weak-probe eta0 of a
// Lambda emitter: Od^2|c = sqrt(Gamma_t) Gamma~ Gamma_g / sqrt(2(Gamma_g + Gamma_p)).
inline double critical_drive_lambda(const RateSet& g)
{
    const double od2 = std::sqrt(g.gamma_t()) * g.gamma_tilde() * g.gamma_nr /
                       std::sqrt(2.0 * (g.gamma_nr + g.gamma_p));
    return std::sqrt(od2);
}

// Drive threshold above which a V emitter amplifies:
// Od0 = sqrt(2 Gp Gamma_t) (2 Gd + Gg) / sqrt(Gg Gamma_t - 4 Gp^2).
inline double drive_threshold_v(const RateSet& g)
{
    const double disc = g.gamma_nr * g.gamma_t() - 4.0 * g.gamma_p * g.gamma_p;
    if (disc <= 0.0)
        throw UndefinedCoefficient("drive threshold needs gamma_nr * gamma_t > 4 gamma_p^2");
    return std::sqrt(2.0 * g.gamma_p * g.gamma_t()) * (2.0 * g.gamma_d + g.gamma_nr) /
           std::sqrt(disc);
}

// g2(0) = (2(R+T) - 1) / T^2.
inline double g2_zero(const TransportCoefficients& tr)
{
    if (tr.t_probe == 0.0)
        throw DivisionByZero("g2(0) undefined at zero probe transmission");
    return (2.0 * (tr.r_probe + tr.t_probe) - 1.0) / (tr.t_probe * tr.t_probe);
}

inline double g2_zero(const EmitterSystem& sys, const Vec8& steady)
{
    const auto p = probe_transport(sys, steady);
    if (p.transmission == 0.0)
        throw DivisionByZero("g2(0) undefined at zero probe transmission");
    return (2.0 * (p.reflection + p.transmission) - 1.0) /
           (p.transmission * p.transmission);
}

struct G2Curve {
    std::vector<double> tau_grid;
    std::vector<double> values;
};

// g2(tau) of the transmitted probe beam at steady state, assembled from the
// three regression trajectories. The population combination <z+ z> is P3 for
// Lambda and 1 - P3 - P1 for V/ladder.
inline G2Curve g2_curve(const EmitterSystem& sys, std::span<const double> tau_grid)
{
    const double gp = sys.rates.gamma_p;
    const double op = sys.drives.omega_p;
    if (op <= 0.0)
        throw UndefinedCoefficient("g2 needs omega_p > 0");

    const Vec8 ss = steady_state(sys);
    const auto tr = probe_transport(sys, ss);
    const double tp = tr.transmission;
    const CorrelatorSet cs = correlators(sys, ss, tau_grid);

    const bool lam = sys.topology == Topology::Lambda;
    const int zs = zeta_slot(sys.topology);
    const int zds = zeta_dagger_slot(sys.topology);
    const cplx s1 = std::conj(ss(zs));
    const cplx s2 = lam ? ss(3) : cplx(1.0) - ss(3) - ss(4);

    const double c1 = 4.0 * gp / op;
    const double c2 = c1 * c1 / 2.0;         // 8 Gp^2 / Op^2
    const double c3 = c1 * c1 * c1 / 4.0;    // 16 Gp^3 / Op^3
    const double c4 = c1 * c1 * c1 * c1 / 16.0; // 16 Gp^4 / Op^4

    G2Curve out;
    out.tau_grid = cs.tau_grid;
    out.values.resize(cs.tau_grid.size());
    for (size_t k = 0; k < cs.tau_grid.size(); ++k) {
        const Vec8& zv = cs.zdag_v[k];
        const Vec8& zvz = cs.zdag_v_z[k];
        const cplx a = zvz(zds);                               // <z+ z+(tau) z>
        const cplx b = lam ? zv(3) : s1 - zv(3) - zv(4);       // <z+ (z+z)(tau)>
        const cplx c = zv(zs);                                 // <z+ z(tau)>
        const cplx dd = zv(zds);                               // <z+ z+(tau)>
        const cplx e = lam ? zvz(3) : s2 - zvz(3) - zvz(4);    // <z+ (z+z)(tau) z>
        const double g = 2.0 * tp - 1.0 - c3 * (a + b).imag() +
                         c2 * (c - dd).real() + c4 * e.real();
        out.values[k] = g / (tp * tp);
    }
    return out;
}

} // namespace waveqed

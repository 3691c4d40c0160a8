#include <gtest/gtest.h>

#include "test_util.hpp"
#include "waveqed/kerr.hpp"
#include "waveqed/observables.hpp"

using namespace waveqed;

namespace {

const RateSet kFig6Rates{.gamma_p = 0.0025, .gamma_d = 0.005, .gamma_nr = 0.0,
                         .gamma_l2 = 0.0028, .gamma_l3 = 0.0118};

} // namespace

TEST(Phase, ClosedFormCases)
{
    EXPECT_DOUBLE_EQ(phase(cplx(0.0, 0.0)), 0.0);
    EXPECT_DOUBLE_EQ(phase(cplx(0.0, 0.2)), 0.0); // real positive transmission
    EXPECT_NEAR(phase(cplx(0.25, 0.25)), M_PI / 4.0, 1e-15);
    EXPECT_THROW(phase(cplx(0.0, 0.5)), UndefinedPhase); // t = 0
}

TEST(Phase, UnwrapRemovesJumps)
{
    std::vector<double> raw = {3.0, -3.1, 3.05, -3.0};
    const auto un = unwrap_phase(raw);
    for (size_t i = 1; i < un.size(); ++i)
        EXPECT_LT(std::abs(un[i] - un[i - 1]), M_PI);
}

TEST(TransmissionAmplitude, LambdaWithoutDriveIsUnity)
{
    RateSet g{.gamma_p = 0.01, .gamma_d = 0.01, .gamma_nr = 0.02};
    DriveSet d{.omega_p = 0.003, .omega_d = 0.0, .delta_p = 0.004};
    const auto s = build_system(Topology::Lambda, g, d);
    const auto tr = transmission_amplitude(s, steady_state(s));
    EXPECT_LT(std::abs(tr.amplitude - cplx(1.0)), 1e-12);
    EXPECT_LT(std::abs(tr.chi), 1e-12);
}

TEST(TransmissionAmplitude, TwoLevelPerfectReflectionWithoutDrive)
{
    RateSet g{.gamma_p = 0.01, .gamma_d = 0.01};
    DriveSet d{.omega_p = 1e-6, .omega_d = 0.0, .delta_p = 0.0};
    for (Topology t : {Topology::V, Topology::Ladder}) {
        const auto s = build_system(t, g, d);
        const auto tr = transmission_amplitude(s, steady_state(s));
        EXPECT_LT(std::abs(tr.amplitude), 1e-6) << topology_name(t);
    }
}

TEST(TransmissionAmplitude, CoherentGainIdentity)
{
    // |t|^2 - 1 equals the coherent amplification efficiency
    testutil::ParamSampler sampler(41);
    for (int rep = 0; rep < 30; ++rep) {
        const RateSet g = sampler.rates(true);
        const DriveSet d = sampler.drives();
        for (Topology t : {Topology::Lambda, Topology::V}) {
            const auto s = build_system(t, g, d);
            const Vec8 m = steady_state(s);
            const auto tr = transmission_amplitude(s, m);
            EXPECT_NEAR(std::norm(tr.amplitude) - 1.0, coherent_amplification(s, m), 1e-10)
                << topology_name(t);
        }
    }
}

TEST(LinearSusceptibility, ClosedFormPoints)
{
    // ladder at resonance
    const cplx chi = linear_susceptibility(Topology::Ladder, kFig6Rates, DriveSet{}, 0.0);
    const cplx want = cplx(0.0, 1.0) * kFig6Rates.gamma_p / kFig6Rates.width_21p();
    EXPECT_LT(std::abs(chi - want), 1e-15);

    // lambda with I_p/I_d -> 0 reduces to the bare two-level form
    DriveSet d{.omega_p = 1e-9, .omega_d = 0.01};
    const double dp = 0.013;
    const cplx lam = linear_susceptibility(Topology::Lambda, kFig6Rates, d, dp);
    const cplx bare = -kFig6Rates.gamma_p / (dp + cplx(0.0, 1.0) * kFig6Rates.width_32());
    EXPECT_LT(std::abs(lam - bare) / std::abs(bare), 1e-9);

    // V and ladder share the linear form
    EXPECT_EQ(linear_susceptibility(Topology::V, kFig6Rates, d, dp),
              linear_susceptibility(Topology::Ladder, kFig6Rates, d, dp));
}

TEST(LinearSusceptibility, MatchesExactInLinearRegime)
{
    const double op = kFig6Rates.gamma_p / 100.0;
    DriveSet d{.omega_p = op, .omega_d = op, .delta_d = 0.0};
    for (Topology t : {Topology::Lambda, Topology::V, Topology::Ladder}) {
        const double lw = (t == Topology::Lambda) ? kFig6Rates.width_32()
                                                  : kFig6Rates.width_21p();
        for (int i = -20; i <= 20; ++i) {
            const double dp = i * lw / 2.0;
            const cplx exact = susceptibility(t, kFig6Rates, d, dp);
            const cplx lin = linear_susceptibility(t, kFig6Rates, d, dp);
            EXPECT_LT(std::abs(exact - lin) / std::abs(exact), 0.01)
                << topology_name(t) << " dp " << dp;
        }
    }
}

TEST(ApproxSusceptibility, DrivelessLimits)
{
    DriveSet off{.omega_p = 1e-9, .omega_d = 0.0};
    const double dp = 0.007;
    // ladder: bracket correction vanishes, chi_a = chi_l
    EXPECT_LT(std::abs(approx_susceptibility(Topology::Ladder, kFig6Rates, off, dp) -
                       linear_susceptibility(Topology::Ladder, kFig6Rates, off, dp)),
              1e-15);
    // lambda: bracket -> 1, the bare two-level form (not zero)
    const cplx bare = -kFig6Rates.gamma_p / (dp + cplx(0.0, 1.0) * kFig6Rates.width_32());
    EXPECT_LT(std::abs(approx_susceptibility(Topology::Lambda, kFig6Rates, off, dp) - bare),
              1e-15);
}

TEST(ApproxSusceptibility, MatchesExactForVanishingProbe)
{
    DriveSet d{.omega_p = kFig6Rates.gamma_p / 1000.0, .omega_d = 0.01414, .delta_d = 0.0};
    for (Topology t : {Topology::Lambda, Topology::V, Topology::Ladder}) {
        for (int i = -40; i <= 40; ++i) {
            const double dp = i * 0.002;
            const cplx exact = susceptibility(t, kFig6Rates, d, dp);
            const cplx approx = approx_susceptibility(t, kFig6Rates, d, dp);
            EXPECT_LT(std::abs(exact - approx) / std::abs(exact), 0.01)
                << topology_name(t) << " dp " << dp;
        }
    }
}

TEST(CrossKerrShift, VanishesWithoutDriveAndAtLargeDetuning)
{
    DriveSet off{.omega_p = 0.001, .omega_d = 0.0, .delta_d = 0.0};
    std::vector<double> grid;
    for (int i = -100; i <= 100; ++i)
        grid.push_back(i * 8e-4);
    const auto r0 = cross_kerr_shift(Topology::Ladder, kFig6Rates, off, grid);
    for (double v : r0.delta_phase)
        EXPECT_EQ(v, 0.0);

    // V: the drive depletes the ground population, so delta-phi carries a slow
    // ~1/delta_p wing; the ladder wing dies off within a few linewidths.
    DriveSet on{.omega_p = 0.001, .omega_d = 0.01414, .delta_d = 0.0};
    for (Topology t : {Topology::V, Topology::Ladder}) {
        const double edge = (t == Topology::V) ? 0.45 : 0.08;
        std::vector<double> wide;
        for (int i = -100; i <= 100; ++i)
            wide.push_back(i * edge / 100.0);
        const auto r = cross_kerr_shift(t, kFig6Rates, on, wide);
        double peak = 0.0;
        for (double v : r.delta_phase)
            peak = std::max(peak, std::abs(v));
        EXPECT_LT(std::abs(r.delta_phase.front()), 0.02 * peak) << topology_name(t);
        EXPECT_LT(std::abs(r.delta_phase.back()), 0.02 * peak) << topology_name(t);
    }
}

TEST(CrossKerrShift, OddSymmetryAtSymmetricParameters)
{
    DriveSet d{.omega_p = 0.001, .omega_d = 0.01414, .delta_d = 0.0};
    std::vector<double> grid;
    for (int i = -60; i <= 60; ++i)
        grid.push_back(i * 1e-3);
    for (Topology t : {Topology::Lambda, Topology::V, Topology::Ladder}) {
        const auto r = cross_kerr_shift(t, kFig6Rates, d, grid);
        double peak = 0.0;
        for (double v : r.delta_phase)
            peak = std::max(peak, std::abs(v));
        const size_t n = grid.size();
        for (size_t i = 0; i < n; ++i)
            EXPECT_LT(std::abs(r.delta_phase[i] + r.delta_phase[n - 1 - i]), 1e-6 * peak)
                << topology_name(t);
    }
}

TEST(ModifiedPhaseShift, VanishesAtLargeDetuningForLambda)
{
    DriveSet d{.omega_p = 0.0022360679774998, .omega_d = 0.01414, .delta_d = 0.0};
    std::vector<double> grid;
    for (int i = -100; i <= 100; ++i)
        grid.push_back(i * 6e-3); // out to 20 linewidths
    const auto m = modified_phase_shift(Topology::Lambda, kFig6Rates, d, grid);
    double peak = 0.0;
    for (double v : m.delta_phase)
        peak = std::max(peak, std::abs(v));
    EXPECT_GT(peak, 1e-3);
    EXPECT_LT(std::abs(m.delta_phase.front()), 0.02 * peak);
    EXPECT_LT(std::abs(m.delta_phase.back()), 0.02 * peak);
    // the standard shift does not vanish out there (phi|off = 0 for lambda)
    const auto r = cross_kerr_shift(Topology::Lambda, kFig6Rates, d, grid);
    EXPECT_GT(std::abs(r.delta_phase.back()), std::abs(m.delta_phase.back()));

    EXPECT_THROW(modified_phase_shift(Topology::V, kFig6Rates, d, grid), UnsupportedTopology);
}

TEST(ModifiedPhaseShift, MatchesStandardShiftForWeakProbeLadder)
{
    // The two definitions differ by the probe-saturation of the reference
    // phase, so they coincide at small probe power and separate as it grows.
    std::vector<double> grid;
    for (int i = -80; i <= 80; ++i)
        grid.push_back(i * 5e-4);
    auto deviation = [&](double np) {
        DriveSet d{.omega_p = omega_for_photon_number(kFig6Rates.gamma_p, np),
                   .omega_d = 0.01414, .delta_d = 0.0};
        const auto std_shift = cross_kerr_shift(Topology::Ladder, kFig6Rates, d, grid);
        const auto mod_shift = modified_phase_shift(Topology::Ladder, kFig6Rates, d, grid);
        double peak = 0.0, worst = 0.0;
        for (size_t i = 0; i < grid.size(); ++i) {
            peak = std::max(peak, std::abs(std_shift.delta_phase[i]));
            worst = std::max(worst,
                             std::abs(std_shift.delta_phase[i] - mod_shift.delta_phase[i]));
        }
        return worst / peak;
    };
    EXPECT_LT(deviation(0.01), 0.05);
    EXPECT_GT(deviation(1.0), 5.0 * deviation(0.01));
}

TEST(KerrCoefficient, OddInProbeDetuning)
{
    for (Topology t : {Topology::Lambda, Topology::V, Topology::Ladder}) {
        EXPECT_EQ(kerr_coefficient(t, kFig6Rates, 0.0), 0.0);
        for (double dp : {0.002, 0.011})
            EXPECT_NEAR(kerr_coefficient(t, kFig6Rates, -dp),
                        -kerr_coefficient(t, kFig6Rates, dp), 1e-9);
    }
}

TEST(KerrCoefficient, FiniteDifferenceSlope)
{
    // d(dphi)/d(Od^2) at Od -> 0 via Richardson extrapolation in Od^2
    const double op = 2e-6, o1 = 4e-4, o2 = 2e-4;
    for (Topology t : {Topology::Lambda, Topology::V, Topology::Ladder}) {
        const PhaseShiftKind kind = natural_shift_kind(t);
        for (double dp : {0.002, 0.005}) {
            DriveSet d1{.omega_p = op, .omega_d = o1, .delta_d = 0.0};
            DriveSet d2{.omega_p = op, .omega_d = o2, .delta_d = 0.0};
            const double u1 = o1 * o1, u2 = o2 * o2;
            const double s1 = phase_shift_at(t, kFig6Rates, d1, dp, kind) / u1;
            const double s2 = phase_shift_at(t, kFig6Rates, d2, dp, kind) / u2;
            const double fd = (s2 * u1 - s1 * u2) / (u1 - u2);
            const double k = kerr_coefficient(t, kFig6Rates, dp);
            EXPECT_LT(std::abs(fd - k) / std::abs(k), 0.02)
                << topology_name(t) << " dp " << dp;
        }
    }
}

TEST(KerrCoefficient, VInducesStrongestNonlinearity)
{
    auto peak_abs = [&](Topology t) {
        double best = 0.0;
        for (int i = 1; i <= 4000; ++i)
            best = std::max(best, std::abs(kerr_coefficient(t, kFig6Rates, i * 1e-5)));
        return best;
    };
    const double kv = peak_abs(Topology::V);
    const double kx = peak_abs(Topology::Ladder);
    const double kl = peak_abs(Topology::Lambda);
    EXPECT_GT(kv, kx);
    EXPECT_GT(kx, kl);
}

TEST(MaxAbsPhaseShift, LocatesInteriorExtremum)
{
    DriveSet d{.omega_p = omega_for_photon_number(kFig6Rates.gamma_p, 1.0),
               .omega_d = 0.01414, .delta_d = 0.0};
    const auto mx = max_abs_phase_shift(Topology::Ladder, kFig6Rates, d);
    EXPECT_NEAR(std::abs(mx.shift), 0.11138, 1e-4); // frozen grid-scan value
    EXPECT_NEAR(mx.delta_p, -0.00883, 2e-4);
}

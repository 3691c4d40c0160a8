#pragma once

// Linear-algebra and integration kernel: steady states, time evolution, and
// quantum-regression two-time correlators of the 8-slot expectation vector.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "waveqed/errors.hpp"
#include "waveqed/model.hpp"

namespace waveqed {

namespace detail {

// Partial-pivot LU with a singularity guard: any |U_ii| below 1e-14 of the
// matrix scale signals an undamped subspace (e.g. all rates zero).
struct Lu8 {
    Eigen::PartialPivLU<Mat8> lu;
    explicit Lu8(const Mat8& r) : lu(r)
    {
        const double scale = r.cwiseAbs().maxCoeff();
        const double tol = 1e-14 * scale;
        const auto diag = lu.matrixLU().diagonal();
        for (int i = 0; i < 8; ++i)
            if (std::abs(diag(i)) <= tol)
                throw SingularSystem("evolution matrix is rank deficient");
    }
    Vec8 solve(const Vec8& b) const { return lu.solve(b); }
};

} // namespace detail

// Long-time steady state M = -R^{-1} W. One iterative-refinement pass keeps
// the residual at the evaluation-roundoff floor.
inline Vec8 steady_state(const EmitterSystem& sys)
{
    detail::Lu8 lu(sys.r);
    Vec8 m = lu.solve(-sys.omega);
    const Vec8 res = sys.r * m + sys.omega;
    m -= lu.solve(res);
    return m;
}

enum class EvolveMethod {
    Adaptive,   // embedded Dormand-Prince 5(4), local relative error 1e-10
    ClosedForm, // M(t) = e^{Rt}(M0 + R^{-1}W) - R^{-1}W; requires R nonsingular
};

namespace detail {

// One Dormand-Prince 5(4) step for the affine system y' = R y + w.
// Returns the 5th-order solution and the embedded error estimate.
inline void dopri5_step(const Mat8& r, const Vec8& w, const Vec8& y, double h,
                        Vec8& y5, Vec8& err)
{
    auto f = [&](const Vec8& v) -> Vec8 { return r * v + w; };
    const Vec8 k1 = f(y);
    const Vec8 k2 = f(y + h * (k1 / 5.0));
    const Vec8 k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const Vec8 k4 = f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const Vec8 k5 = f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                               64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const Vec8 k6 = f(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                               46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                               5103.0 / 18656.0 * k5));
    y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                  2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    const Vec8 k7 = f(y5);
    // difference between the 5th-order and embedded 4th-order solutions
    err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 -
               17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
}

constexpr double kRelTol = 1e-10;
constexpr double kAbsTol = 1e-14;

// Integrate y' = R y + w from t=0 to t=tend (tend >= 0), adaptively.
inline Vec8 integrate_affine(const Mat8& r, const Vec8& w, Vec8 y, double tend)
{
    if (tend <= 0.0)
        return y;
    // initial step from the matrix scale
    const double rnorm = r.cwiseAbs().rowwise().sum().maxCoeff();
    double h = (rnorm > 0.0) ? std::min(tend, 0.1 / rnorm) : tend;
    double t = 0.0;
    while (t < tend) {
        h = std::min(h, tend - t);
        Vec8 y5, err;
        dopri5_step(r, w, y, h, y5, err);
        double emax = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double sc = kAbsTol + kRelTol * std::max(std::abs(y(i)), std::abs(y5(i)));
            emax = std::max(emax, std::abs(err(i)) / sc);
        }
        if (emax <= 1.0) {
            t += h;
            y = y5;
        }
        const double fac = (emax > 0.0) ? 0.9 * std::pow(emax, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
    return y;
}

} // namespace detail

inline Vec8 evolve(const EmitterSystem& sys, const Vec8& state0, double t,
                   EvolveMethod method = EvolveMethod::Adaptive)
{
    if (t < 0.0)
        throw Error("evolve: t must be >= 0");
    if (t == 0.0)
        return state0;
    if (method == EvolveMethod::ClosedForm) {
        detail::Lu8 lu(sys.r);
        const Vec8 minf = lu.solve(-sys.omega);
        const Mat8 e = (sys.r * t).exp();
        return e * (state0 - minf) + minf;
    }
    return detail::integrate_affine(sys.r, sys.omega, state0, t);
}

// ---------------------------------------------------------------------------
// Emitter operator algebra on the basis |i><j|, i,j in {1,2,3}. Used for the
// equal-time initial conditions of the regression correlators.

struct OperatorExpr {
    // c(i,j) multiplies |i+1><j+1|
    Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();

    static OperatorExpr unit(int i, int j)
    {
        OperatorExpr e;
        e.c(i, j) = 1.0;
        return e;
    }
    static OperatorExpr sigma() { return unit(0, 1); }   // |1><2|
    static OperatorExpr mu() { return unit(1, 2); }      // |2><3|
    static OperatorExpr nu() { return unit(2, 0); }      // |3><1|
    static OperatorExpr identity()
    {
        OperatorExpr e;
        e.c = Eigen::Matrix3cd::Identity();
        return e;
    }

    OperatorExpr dagger() const
    {
        OperatorExpr e;
        e.c = c.adjoint();
        return e;
    }
};

inline OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b)
{
    OperatorExpr e;
    e.c = a.c * b.c; // |i><j| |k><l| = delta_jk |i><l|
    return e;
}

// Exact product of a sequence of basis expressions (identity for empty input).
inline OperatorExpr reduce_product(std::span<const OperatorExpr> ops)
{
    OperatorExpr acc = OperatorExpr::identity();
    for (const auto& op : ops)
        acc = acc * op;
    return acc;
}

// The eight tracked slot operators, as dressed-frame basis expressions.
// Products of dressed operators close on this set with the bare structure
// constants (sg mu = nu+, mu nu = sg+, nu sg = mu+ in every frame), so the
// algebra can be evaluated on the bare matrices.
inline const std::array<OperatorExpr, 8>& slot_operators()
{
    static const std::array<OperatorExpr, 8> ops = {
        OperatorExpr::nu().dagger(),
        OperatorExpr::sigma(),
        OperatorExpr::mu().dagger(),
        OperatorExpr::nu() * OperatorExpr::nu().dagger(),     // P3
        OperatorExpr::sigma() * OperatorExpr::sigma().dagger(), // P1
        OperatorExpr::mu(),
        OperatorExpr::sigma().dagger(),
        OperatorExpr::nu(),
    };
    return ops;
}

// Probe-transition lowering operator: zeta_Lambda = mu, zeta_V = zeta_Xi = sigma.
inline OperatorExpr zeta_operator(Topology t)
{
    return t == Topology::Lambda ? OperatorExpr::mu() : OperatorExpr::sigma();
}

inline int zeta_slot(Topology t) { return t == Topology::Lambda ? 5 : 1; }
inline int zeta_dagger_slot(Topology t) { return t == Topology::Lambda ? 2 : 6; }

// Expectation of an arbitrary basis expression in a tracked state, using
// completeness P1 + P2 + P3 = 1 to eliminate P2:
//   <A> = a22 + (a11 - a22) <P1> + (a33 - a22) <P3> + off-diagonal slots.
inline cplx expectation(const OperatorExpr& a, const Vec8& m)
{
    const auto& c = a.c;
    return c(1, 1) + (c(0, 0) - c(1, 1)) * m(4) + (c(2, 2) - c(1, 1)) * m(3) +
           c(0, 2) * m(0) + c(0, 1) * m(1) + c(2, 1) * m(2) + c(1, 2) * m(5) +
           c(1, 0) * m(6) + c(2, 0) * m(7);
}

// Two-time correlator trajectories for g2, from the quantum regression
// theorem: each vector obeys dC/dtau = R C + W s with the equal-time scalar s
// of the sandwiching zeta operators.
struct CorrelatorSet {
    std::vector<double> tau_grid;
    std::vector<Vec8> zdag_v;   // <z+(t') V(t'+tau)>
    std::vector<Vec8> zdag_v_z; // <z+(t') V(t'+tau) z(t')>
    std::vector<Vec8> v_z;      // <V(t'+tau) z(t')>
};

inline CorrelatorSet correlators(const EmitterSystem& sys, const Vec8& steady,
                                 std::span<const double> tau_grid)
{
    const OperatorExpr z = zeta_operator(sys.topology);
    const OperatorExpr zd = z.dagger();
    const auto& slots = slot_operators();

    Vec8 c1, c2, c3;
    for (int i = 0; i < 8; ++i) {
        c1(i) = expectation(zd * slots[i], steady);
        c2(i) = expectation(zd * slots[i] * z, steady);
        c3(i) = expectation(slots[i] * z, steady);
    }
    const cplx s1 = expectation(zd, steady);
    const cplx s2 = expectation(zd * z, steady);
    const cplx s3 = expectation(z, steady);

    CorrelatorSet out;
    out.tau_grid.assign(tau_grid.begin(), tau_grid.end());
    const size_t n = out.tau_grid.size();
    out.zdag_v.resize(n);
    out.zdag_v_z.resize(n);
    out.v_z.resize(n);

    double tau = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double dt = out.tau_grid[k] - tau;
        if (dt < 0.0)
            throw Error("correlators: tau grid must be ascending and >= 0");
        c1 = detail::integrate_affine(sys.r, sys.omega * s1, c1, dt);
        c2 = detail::integrate_affine(sys.r, sys.omega * s2, c2, dt);
        c3 = detail::integrate_affine(sys.r, sys.omega * s3, c3, dt);
        tau = out.tau_grid[k];
        out.zdag_v[k] = c1;
        out.zdag_v_z[k] = c2;
        out.v_z[k] = c3;
    }
    return out;
}

// Geometric delay grid from 0 to 20/min(nonzero rates), 400 points.
inline std::vector<double> default_tau_grid(const RateSet& rates, int n_points = 400,
                                            double span_factor = 20.0)
{
    double rmin = std::numeric_limits<double>::infinity();
    for (double g : {rates.gamma_p, rates.gamma_d, rates.gamma_nr, rates.gamma_l2, rates.gamma_l3})
        if (g > 0.0)
            rmin = std::min(rmin, g);
    if (!std::isfinite(rmin))
        throw Error("default_tau_grid: all rates are zero");
    const double tmax = span_factor / rmin;
    std::vector<double> grid(n_points);
    grid[0] = 0.0;
    const double t0 = tmax * 1e-3;
    const double ratio = std::pow(tmax / t0, 1.0 / double(n_points - 2));
    for (int k = 1; k < n_points; ++k)
        grid[k] = t0 * std::pow(ratio, k - 1);
    grid.back() = tmax;
    return grid;
}

} // namespace waveqed

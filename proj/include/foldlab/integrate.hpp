#pragma once

// Adaptive ODE integration with dense output, event localization, and
// first-variational transport.
//
// Two cores drive everything:
//   * an explicit embedded 5(4) pair with quartic dense output and a PI
//     step controller (nonstiff paths, the Chini system, harmonic tests);
//   * an L-stable one-step implicit method of order 3 (singly diagonally
//     implicit, three stages) with analytic-Jacobian Newton stages and cubic
//     Hermite dense output (the O(1/eps) switching layer).
//
// A layer-aware wrapper switches between them inside |y| < O(eps) when the
// explicit step prediction collapses, which is how orbits cross the
// regularization layer at eps down to 1e-6 without step-size underflow.
//
// Dimensions run from 1 to 4: planar state (x, y) optionally augmented by a
// transported tangent v' = J(z) v, or the rescaled-passage system
// (u, v, v1, v2).  Events are scalar functions of the state localized on the
// dense interpolant (bracket, safeguarded secant, final Newton projection
// onto the true trajectory), with a post-event dead-band and a direction
// filter; grazing (g and dg/dt both ~ 0) is reported via a flag, not an
// error.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "foldlab/common.hpp"
#include "foldlab/models.hpp"

namespace foldlab {

inline constexpr int kMaxOdeDim = 4;

/// RHS of a small ODE system: dz = f(t, z), dim components.
using RhsFn = std::function<void(double t, const double* z, double* dz)>;

/// Iteration matrix (row-major dim x dim) for the implicit stages.  It only
/// steers Newton, so block approximations (e.g. ignoring the
/// tangent-on-state cross block) are fine: the converged step is exact.
using JacFn = std::function<void(double t, const double* z, double* jac)>;

/// Scalar event function over the state vector.
struct EventSpec {
    std::function<double(const double* z)> g;
    int direction = 0;     // +1 fire on g increasing, -1 decreasing, 0 any
    bool terminal = false;
    int id = 0;
};

/// Make the standard section event g = z[component] - level.
EventSpec section_event(int component, double level, int direction, bool terminal,
                        int id = 0);

struct EventHit {
    double t = 0.0;
    std::array<double, kMaxOdeDim> z{};
    int event_id = 0;
    bool tangential = false;  // g and its flow derivative both vanished
};

/// One accepted step's dense interpolant: monomial coefficients in
/// theta = (t - t0)/h per component, z_i(theta) = sum_j c[i][j] theta^j.
struct StepRecord {
    double t0 = 0.0;
    double h = 0.0;
    std::array<std::array<double, 5>, kMaxOdeDim> c{};
};

struct OdeOptions {
    double tol = 1e-10;        // local error tolerance, must lie in [1e-13, 1e-6]
    double event_tol = 1e-12;  // |g| <= event_tol * scale at reported hits
    long max_steps = 4000000;
    double h_init = 0.0;   // 0 = automatic
    double h_max = 0.0;    // 0 = span
    double h_fixed = 0.0;  // > 0 disables adaptivity (order-verification runs)
    // Optional admissible box on the first two components; leaving it raises
    // EscapeError (chart-box guard).
    std::optional<std::array<double, 4>> escape_box;  // {xmin, xmax, ymin, ymax}
    // Guard against runaway orbits regardless of the box.
    double overflow_norm = 1e8;
};

/// Dense-output trajectory.  Times are elapsed integration time (>= 0); for
/// backward runs the physical time is -times[i].
struct OrbitSegment {
    int dim = 2;
    bool backward = false;
    bool has_tangent = false;  // components 2,3 transport a tangent vector
    std::vector<double> times;
    std::vector<std::array<double, kMaxOdeDim>> states;
    std::vector<StepRecord> steps;
    std::vector<EventHit> events;
    bool event_terminated = false;
    double t_end = 0.0;
    long n_rhs = 0;
    long n_steps = 0;
    long n_rejected = 0;
    long n_implicit = 0;  // accepted steps taken by the implicit core

    void state_at(double t, double* out) const;
    Vec2 plane_at(double t) const;
    Vec2 tangent_at(double t) const;
    Vec2 end_plane() const;
    Vec2 end_tangent() const;
};

/// Real roots of d/dtheta of a quartic (monomial coeffs c[0..4]) inside
/// (0, 1); used for interior extrema of dense components.
std::vector<double> dense_extrema_01(const std::array<double, 5>& c);

/// Evaluate a dense monomial polynomial at theta.
double dense_eval(const std::array<double, 5>& c, double theta);

// ---------------------------------------------------------------------------
// Generic small-system cores
// ---------------------------------------------------------------------------

/// Explicit adaptive 5(4) integration of an N-dimensional system.
OrbitSegment integrate_ode(const RhsFn& rhs, int dim, const double* z0, double t_max,
                           const std::vector<EventSpec>& events = {},
                           const OdeOptions& opts = {});

/// Implicit L-stable order-3 integration of an N-dimensional system.
OrbitSegment integrate_ode_implicit(const RhsFn& rhs, const JacFn& jac, int dim,
                                    const double* z0, double t_max,
                                    const std::vector<EventSpec>& events = {},
                                    const OdeOptions& opts = {});

// ---------------------------------------------------------------------------
// Planar-field frontends
// ---------------------------------------------------------------------------

/// Explicit integration of a smooth planar field.
OrbitSegment integrate(const SmoothField2D& field, Vec2 z0, double alpha, double t_max,
                       double tol, const std::vector<EventSpec>& events = {},
                       bool backward = false, const OdeOptions& opts = {});

/// Planar field plus transported tangent v' = J(z(t)) v (components 2,3).
OrbitSegment integrate_variational(const SmoothField2D& field, Vec2 z0, Vec2 v0,
                                   double alpha, double t_max, double tol,
                                   const std::vector<EventSpec>& events = {},
                                   bool backward = false, const OdeOptions& opts = {});

/// Implicit integration of a smooth planar field (stiff layers).
OrbitSegment integrate_implicit(const SmoothField2D& field, Vec2 z0, double alpha,
                                double t_max, double tol,
                                const std::vector<EventSpec>& events = {},
                                bool backward = false, const OdeOptions& opts = {});

/// Explicit integration with automatic implicit handoff inside the
/// regularization layer |y| < 10 eps (switch in when the predicted explicit
/// step falls under 5 eps, back out at |y| > 12 eps).  Optional tangent.
OrbitSegment integrate_auto(const SmoothField2D& field, Vec2 z0,
                            const std::optional<Vec2>& v0, double alpha, double t_max,
                            double tol, double eps,
                            const std::vector<EventSpec>& events = {},
                            bool backward = false, const OdeOptions& opts = {});

}  // namespace foldlab

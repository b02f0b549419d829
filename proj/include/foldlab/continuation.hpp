#pragma once

// Newton solvers and pseudo-arclength continuation for limit cycles of the
// return map P, detection of Hopf / grazing / saddle-node points, and the
// eps-sweep producing the scaling fit of log(alpha* - alpha_SN) vs log eps.

#include <string>
#include <vector>

#include "foldlab/maps.hpp"

namespace foldlab {

/// A converged fixed point of the return map (one limit cycle).
struct BranchPoint {
    double alpha = 0.0;
    double x_fix = 0.0;
    double multiplier = 0.0;  // P'_x at the fixed point
    double y_min = 0.0;       // min y along the cycle
    double flight_time = 0.0;
};

struct BranchResult {
    std::vector<BranchPoint> points;
    std::vector<std::size_t> fold_indices;  // d alpha sign changes along arclength
    bool truncated = false;
    std::string truncation_reason;
};

/// A saddle-node of cycles: P = id, P'_x = 1, nondegenerate.
struct FoldPoint {
    double eps = 0.0;
    double alpha_sn = 0.0;
    double x_sn = 0.0;
    double d2xx = 0.0;      // P''_xx at the fold (nondegeneracy)
    double dp_dalpha = 0.0; // P'_alpha at the fold (transversality)
    Polyline orbit;         // the fold cycle, closed polyline
};

struct GrazingResult {
    double alpha_star = 0.0;
    Polyline gamma0;          // grazing cycle of the upper field
    double dymin_dalpha = 0.0;  // final secant slope of y_min(alpha)
    double y_min_residual = 0.0;
};

struct HopfResult {
    double alpha_h = 0.0;
    double det_j = 0.0;  // Jacobian determinant at the Hopf point (> 0)
    Vec2 equilibrium;
};

struct ScalingPoint {
    double eps = 0.0;
    bool ok = false;
    double alpha_sn = 0.0;
    double x_sn = 0.0;
    double gap = 0.0;  // alpha_star - alpha_sn
    double hausdorff_to_grazing = 0.0;
    std::string error;
};

struct ScalingFit {
    double alpha_star = 0.0;
    std::vector<ScalingPoint> points;
    int n_ok = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct TraceOptions {
    double ds0 = 1e-3;
    double ds_min = 1e-5;
    double ds_max = 1e-2;
    int max_points = 2000;
    bool stop_after_fold = false;  // stop a few steps past the first fold
    double alpha_margin = 0.05;    // stop when alpha leaves the window by this
};

/// Damped shooting Newton on F(x) = P(x) - x using the variational P'_x.
/// Converges to |F| <= 1e-10 within 50 iterations (up to 6 halvings per
/// step); works for repelling cycles since shooting does not need stability.
/// Throws ConvergenceError with the last residual on failure.
BranchPoint cycle_newton(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                         const SectionPair& sections, double x0, double alpha);

/// Settle onto the attracting cycle by forward simulation from z0 for
/// t_settle, seed Newton from the last downward section crossing.
BranchPoint stable_cycle_from_simulation(const PwsModel& model, const RegFnDescriptor& fn,
                                         double eps, const SectionPair& sections,
                                         double alpha, Vec2 z0, double t_settle = 400.0);

/// Pseudo-arclength continuation in (x, alpha) with secant predictor and
/// Newton corrector; step adapts in [ds_min, ds_max]; folds flagged where
/// d alpha changes sign along the branch.  Corrector divergence after 3 step
/// halvings truncates the branch (returned, flagged).
BranchResult trace_branch(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                          const SectionPair& sections, double alpha_start,
                          double alpha_end, const BranchPoint& seed,
                          const TraceOptions& opts = {});

/// Newton on the augmented system {P - x = 0, P'_x - 1 = 0} in (x, alpha).
/// P'_x from the variational tangent; P'_alpha, P''_xx, P''_xalpha by
/// central differences of accurate quantities.  Residual <= 1e-9; verifies
/// |P''_xx| and |P'_alpha| above 1e-6 nondegeneracy floors.
FoldPoint solve_fold(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                     const SectionPair& sections, const BranchPoint& guess);

/// Grazing parameter of the upper field: natural continuation of the pure
/// Z+ cycle family (eps = 0 maps) from alpha0 toward alpha1 in adaptive
/// steps until y_min changes sign, then a bracketed secant to |y_min| <=
/// 1e-8.  Small steps matter: one-loop evaluations from a stale fixed point
/// can dive deep below the switching line, where the friction law blows up.
/// alpha0 must carry a cycle with y_min > 0 (alpha0 < alpha_star);
/// interior_start must lie strictly inside the repelling cycle at alpha0
/// (backward-time settling lands on the cycle from there).
GrazingResult grazing_alpha(const PwsModel& model, const SectionPair& sections,
                            double alpha0, double alpha1, Vec2 interior_start);

/// Hopf parameter: continue the equilibrium (2-d Newton per alpha from
/// eq_guess) and bisect trace(J) = 0 over [alpha_lo, alpha_hi].
HopfResult equilibrium_hopf(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                            double alpha_lo, double alpha_hi, Vec2 eq_guess);

/// Model-specific seeds for the sweep pipeline (the caller knows the model's
/// geometry; the defaults suit nothing in particular).
struct SweepSettings {
    double alpha_graze_seed0 = 0.0;  // secant seeds for alpha_star
    double alpha_graze_seed1 = 0.0;
    double alpha_stable_probe = 0.0; // alpha where the attracting cycle surely exists
    Vec2 sim_start;                  // forward-simulation start at that alpha
    double t_settle = 400.0;
    TraceOptions trace;
    int jobs = 0;
};

/// One eps: settle on the stable branch at alpha_stable_probe, trace toward
/// alpha_star until the fold flags, then polish with solve_fold.  When the
/// flagged point sits deep on the stable side (multiplier ~ 0: the layer
/// contraction is exponential, hiding the fold from Newton's linear model),
/// the m = 1 crossing is first localized along the branch graph alpha(x).
FoldPoint find_fold_for_eps(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                            const SectionPair& sections, const SweepSettings& settings,
                            double alpha_star);

/// Full sweep: alpha_star once from the pure Z+ system, then per-eps folds
/// (independent, parallel), then the log-log fit of the gaps.  Failing eps
/// entries are recorded, not thrown; the fit uses the surviving points.
ScalingFit scaling_sweep(const PwsModel& model, const RegFnDescriptor& fn,
                         const std::vector<double>& eps_list, const SectionPair& sections,
                         const SweepSettings& settings);

/// Sign-change scan of P(x) - x over [x_lo, x_hi] (n intervals); returns the
/// bracketing-interval midpoints.  Used for the exactly-two-cycles checks.
std::vector<double> count_fixed_points_scan(const PwsModel& model,
                                            const RegFnDescriptor& fn, double eps,
                                            const SectionPair& sections, double alpha,
                                            double x_lo, double x_hi, int n,
                                            int jobs = 0);

}  // namespace foldlab

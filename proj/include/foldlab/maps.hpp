#pragma once

// Section-to-section maps over the switching layer: the local transition map
// Q across the fold, the full Poincare return map P, their derivatives from
// variational transport, and orbit statistics (minimum y, Hausdorff distance
// between closed orbits, slow-manifold exit point m(eps)).

#include <optional>
#include <vector>

#include "foldlab/integrate.hpp"
#include "foldlab/models.hpp"
#include "foldlab/regfn.hpp"

namespace foldlab {

using Polyline = std::vector<Vec2>;

/// Horizontal sections y = delta with sampling intervals around the
/// tangent-orbit intersections gamma_L < 0 < gamma_R (local-map geometry),
/// and the admissible chart box [-xi, xi]^2.
struct SectionPair {
    double delta = 0.04;
    double xi = 1.5;
    double gamma_l = -0.2;
    double gamma_r = 0.2;
    double il_lo = -0.45, il_hi = -0.01;  // I_L in x < 0
    double ir_lo = 0.01, ir_hi = 0.45;    // I_R in x > 0
    bool local_geometry = true;  // false: plain return section (friction map)

    /// Sections for the fold normal form: gamma = +-sqrt(delta).
    static SectionPair normal_form(double delta = 0.04, double xi = 1.5);
    /// Plain return section for the friction oscillator.
    static SectionPair friction(double delta = 0.15);

    void validate() const;
};

/// One evaluation of a section-to-section map.
struct ReturnSample {
    double x_out = 0.0;
    double d1 = 0.0;                // first derivative of the map at x
    std::optional<double> d2;       // second derivative (Richardson of d1)
    double flight_time = 0.0;
    bool slid = false;              // eps = 0 composite took the sliding branch
};

/// Scaling exponent 2k/(2k+1) attached to a regularization family
/// (1 for super-algebraic tails, k = infinity).
double scaling_exponent(const DecayData& decay);

/// Local transition map Q: from (x, delta) on the incoming section, first
/// upward crossing of y = delta on the outgoing side.
///
/// eps > 0 integrates the regularized field (layer-aware core switching);
/// eps = 0 uses the PWS composite in the normal-form layout: Z+ flight to
/// y = 0, Filippov slide to the fold at x = 0, lift-off along Z+.  d1 comes
/// from the transported tangent projected along the flow at arrival,
/// d1 = V1 - (F1/F2) V2; d2 (on request) by Richardson-extrapolated central
/// differences of d1 with h = max(1e-5, eps^{2k/(2k+1)}/100).
ReturnSample q_map(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                   const SectionPair& sections, double x, double alpha,
                   bool want_d2 = false);

/// Full Poincare return map P to the section y = delta (crossing downward),
/// for models with a global return (friction oscillator).  eps = 0 means the
/// pure Z+ flow (the PWS grazing-cycle object); eps > 0 the regularized
/// field.  d1 is the cycle multiplier at a fixed point.  Throws
/// NotFoundError when no return occurs within t_max.
ReturnSample p_map(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                   const SectionPair& sections, double x, double alpha,
                   bool want_d2 = false, double t_max = 200.0, double tol = 1e-10);

/// One full return as a dense-output orbit (with the transported tangent
/// when requested); the building block of p_map and of cycle diagnostics
/// like min-y.  Throws NotFoundError when no return occurs within t_max.
OrbitSegment p_map_segment(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                           const SectionPair& sections, double x, double alpha,
                           bool with_tangent = false, double t_max = 200.0,
                           double tol = 1e-10);

/// The orbit polyline of one full return (for Hausdorff comparisons).
Polyline p_map_orbit(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                     const SectionPair& sections, double x, double alpha,
                     double t_max = 200.0, double tol = 1e-10);

/// Global minimum of y over a dense-output orbit (per-step interpolant
/// extrema, then endpoint comparison).  Returns {y_min, t_at_min}.
std::pair<double, double> min_y_of_orbit(const OrbitSegment& orbit);

/// Exact two-sided Hausdorff distance between closed polylines (max over
/// vertices of min point-to-segment distance, both directions).  Serial
/// reference implementation; the OpenMP kernel lives in sweep.hpp.
double hausdorff_distance(const Polyline& a, const Polyline& b);

/// Distance from a point to a closed polyline (min over segments).
double point_polyline_distance(const Vec2& p, const Polyline& poly);

/// Slow-manifold exit point m(eps): start on (x_start, 0) deep in the
/// sliding interval, let the orbit settle onto the attracting slow manifold
/// for the transient 5 |x_start| / (1 - 2 x_start), then record the first
/// upward crossing of y = delta.
double measure_slow_manifold_exit(const PwsModel& model, const RegFnDescriptor& fn,
                                  double eps, const SectionPair& sections,
                                  double x_start = -0.9);

}  // namespace foldlab

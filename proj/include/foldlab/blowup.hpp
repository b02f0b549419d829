#pragma once

// Coordinate charts for the cylindrical blowup of the switching manifold and
// the weighted spherical blowup of the visible fold.  Charts are pure
// algebra (lenses onto Cartesian (x, y, eps) data); no flow is integrated in
// chart variables.  Also hosts the Q-map region report that ties the chart
// scalings to measured transition-map derivatives.

#include <array>
#include <string>
#include <vector>

#include "foldlab/sweep.hpp"

namespace foldlab {

enum class ChartId { cyl_y1, cyl_eps2, cyl_ym3, sph_r1, sph_eps2 };

std::string chart_name(ChartId id);

/// A point in one chart.  Coordinate layout:
///   cyl_y1   (r1, eps1):      y = r1,       eps = r1 eps1
///   cyl_eps2 (r2, y2):        y = r2 y2,    eps = r2
///   cyl_ym3  (r3, eps3):      y = -r3,      eps = r3 eps3
///   sph_r1   (rho1, x1, eps1): x = rho1^k x1, y = rho1^{2k}, eps = rho1^{2k+1} eps1
///   sph_eps2 (rho2, r2, x2):   x = rho2^k x2, y = rho2^{2k} r2, eps = rho2^{2k+1} r2
struct ChartPoint {
    ChartId id = ChartId::cyl_y1;
    std::array<double, 3> coords{};  // third entry unused in cylinder charts
    int k = 0;                       // decay rate, sphere charts only

    void validate() const;  // radial coordinates >= 0, k >= 1 on the sphere
};

ChartPoint make_cyl(ChartId id, double radial, double angular);
ChartPoint make_sph(ChartId id, double c0, double c1, double c2, int k);

/// Cylinder chart -> (y, eps).  Exact formula evaluation.
std::pair<double, double> cyl_to_cartesian(const ChartPoint& p);

/// Cylinder chart change; requires the overlap (the relevant angular
/// coordinate nonzero with the right sign), throws DomainError outside it.
ChartPoint cyl_chart_change(const ChartPoint& p, ChartId target);

/// Spherical chart 1 from Cartesian data (composition through the cylinder
/// chart y = r1): rho1 = y^{1/(2k)}, x1 = x y^{-1/2}, eps1 = eps y^{-(2k+1)/(2k)}.
/// y = 0 is the chart boundary: only the origin maps there (rho1 = 0 limit).
ChartPoint sphere_from_cartesian(double x, double y, double eps, int k);

/// Either sphere chart -> (x, y, eps).
std::array<double, 3> sphere_to_cartesian(const ChartPoint& p);

/// Sphere chart change, chart 1 <-> chart 2:
///   rho2 = rho1 eps1,  r2 = eps1^{-2k},  x2 = eps1^{-k} x1
/// and the inverse.  Requires eps1 > 0 (resp. r2 > 0).
ChartPoint sphere_chart_change(const ChartPoint& p, ChartId target);

/// The quantity rho^{2k+1} * (second radial coordinate), equal to eps in
/// both sphere charts and therefore invariant under chart changes.  (In
/// chart 1 this is rho1^{2k+1} eps1; in chart 2, rho2^{2k+1} r2.)
double sphere_conservation(const ChartPoint& p);

// ---------------------------------------------------------------------------
// Q-map region report
// ---------------------------------------------------------------------------

/// Derivative statistics of the transition map Q in the three x-windows
/// around gamma_L whose widths are set by the blowup scaling eps^{2k/(2k+1)}.
struct RegionStats {
    double eps = 0.0;
    double p_exp = 0.0;  // 2k/(2k+1)
    // window edges actually used
    double i_lo = 0.0, i_hi = 0.0;
    double ii_lo = 0.0, ii_hi = 0.0;
    double iii_lo = 0.0, iii_hi = 0.0;
    bool iii_valid = false;  // region (iii) window can collapse at large eps
    // region (i): exponential contraction
    double max_abs_d1_i = 0.0;
    // region (ii): concave decreasing passage
    int n_ok_ii = 0;
    int n_d1_neg = 0;
    int n_d2_neg = 0;
    bool unique_half_crossing = false;  // d1 crosses -0.5 exactly once
    double x_half_crossing = 0.0;
    // region (iii): near-reflection
    double max_dev_iii = 0.0;  // max | |d1| - 1 |
    std::vector<GridSample> samples_i, samples_ii, samples_iii;
};

/// Sample q_map derivatives on n points per region per eps.  Window layout
/// (p = 2k/(2k+1), all x relative to gamma_L):
///   (i)   [-theta, -theta/3]          fixed offsets left of the fold orbit
///   (ii)  [-(chi/6) eps^p, chi eps^p] the blowup center window
///   (iii) [1.25 chi eps^p, |gamma_L|/10]  fixed outer edge, marked invalid
///                                         when the window collapses
/// chi and theta are config-exposed; defaults calibrated for the fold
/// normal form with delta = 0.04.
std::vector<RegionStats> q_region_report(const PwsModel& model, const RegFnDescriptor& fn,
                                         const std::vector<double>& eps_list,
                                         const SectionPair& sections, double chi = 12.0,
                                         double theta = 0.006, int n_per_region = 30,
                                         int jobs = 0);

}  // namespace foldlab

#pragma once

// Independent oracle for the rescaled fold passage: the planar system
// u' = 1, v' = 2u + v^{-k} between sections {v = c}, its transition map
// U(u0) = u0 + T(u0), the derivatives U', U'' from variational flows, and
// grid scans of the sign conditions U' in (-1,0), U'' < 0, v1 > 0, w > 0.

#include <vector>

#include "foldlab/common.hpp"

namespace foldlab {

struct ChiniConfig {
    int k = 2;        // algebraic decay rate, >= 1
    double c = 1.0;   // section level v = c, > 0
    double u0 = -2.0; // start on the incoming section: 2 u0 + c^{-k} < 0

    void validate() const;
    /// Nullcline intersection with the section, u_b = -c^{-k}/2: starts to
    /// its right leave the section upward immediately (boundary of Sigma_L).
    double boundary_u() const;
};

struct ChiniResult {
    double T = 0.0;   // time of flight back to v = c
    double U = 0.0;   // u0 + T
    double U1 = 0.0;  // U'(u0)
    double U2 = 0.0;  // U''(u0)
    double v1_T = 0.0;
    double v2_T = 0.0;
    double w_T = 0.0;     // w = 2 v' - v1 at the return
    double vdot_T = 0.0;  // v'(T), > 0 at a transversal return
};

/// Transition only: integrate from (u0, c) to the first return v = c with
/// v' > 0.  Throws SingularityError if v falls below 1e-6 and NotFoundError
/// if the orbit does not return.
ChiniResult chini_transition(const ChiniConfig& cfg, double tol = 1e-12);

/// Transition plus first and second variations v1, v2 (v1(0) = v2(0) = 0)
/// transported along the orbit; U' = 1 + T' with T' = -v1(T)/v'(T), and U''
/// assembled from the chain rule at the section return.  Throws
/// SingularityError on a tangential return (v'(T) = 0).
ChiniResult chini_derivatives(const ChiniConfig& cfg, double tol = 1e-12);

/// Leading-order flight-time derivative near the section boundary,
/// T'(u0) = -2 - (2/3) k c^{-k-1} (c^{-k} + 2 u0) + O(h^2).
double chini_boundary_tprime(int k, double c, double u0);

struct ChiniScanRow {
    double u0, T, U, U1, U2, v1_T, w_T;
};

struct ChiniScanReport {
    std::vector<ChiniScanRow> rows;
    bool all_pass = false;
    // margins: how far the worst point sits from each sign boundary
    double min_u1_gap_low = 0.0;   // min over grid of U1 - (-1)
    double min_u1_gap_high = 0.0;  // min over grid of 0 - U1
    double min_neg_u2 = 0.0;       // min over grid of -U2
    double min_v1 = 0.0;
    double min_w = 0.0;
    std::vector<std::string> violations;
};

/// Scan the sign conditions over a u0 grid (>= 100 points recommended).
/// Violations are reported, not thrown.  Grid points inside the boundary
/// layer |2 u0 + c^{-k}| < 1e-4 are rejected by ChiniConfig::validate.
ChiniScanReport chini_property_scan(int k, double c, const std::vector<double>& u0_grid,
                                    double tol = 1e-12);

/// Evenly spaced admissible grid on [u_lo, u_hi] with u_hi below the
/// boundary layer.  The default left edge keeps |U'| above integration
/// noise: the contraction is double-exponential in |u0| and falls below
/// 1e-13 (unresolvable sign) already by u0 ~ -2.5 for k <= 3, c <= 2.
std::vector<double> chini_default_grid(int k, double c, int n, double u_lo = -2.0);

}  // namespace foldlab

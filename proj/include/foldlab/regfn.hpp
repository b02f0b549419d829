#pragma once

// Regularization functions phi(s, eps): smooth, strictly increasing switches
// with limits 0 (s -> -inf) and 1 (s -> +inf), plus algebraic-decay metadata.
//
// The decay metadata describes how fast the tails close:
//   1 - phi(1/e1, r*e1) = e1^{k+} * (phi_plus_00 + o(1)),   e1 -> 0,
// and symmetrically at s -> -inf with k- / phi_minus_00.  The decay rate k
// controls the saddle-node scaling exponent 2k/(2k+1) downstream.

#include <string>

#include "foldlab/common.hpp"

namespace foldlab {

enum class RegFnId {
    smooth_sqrt,         // 1/2 (1 + s / sqrt(s^2 + 1)),        k = 2
    goldbeter_koshland,  // two-argument rational/sqrt form,    k = 1
    arctan,              // 1/2 + arctan(s) / pi,               k = 1
    logistic,            // 1 / (1 + exp(-s)),                  k = infinity
};

/// Decay metadata of a regularization function.
///
/// phi_plus_00 stores the tail *prefactor*: for smooth_sqrt the expansion
/// 1 - phi(1/e1) = (1/4) e1^2 + O(e1^4) admits two readings -- either the
/// whole product e1^k * phi_plus equals (1/4) e1^2 (prefactor 1/4, used
/// here), or phi_plus itself is the displayed (1/4) e1^2 (which would decay,
/// contradicting the bounded-prefactor requirement).  We record the bounded
/// reading phi_plus_00 = 1/4 and keep this note instead of silently picking.
struct DecayData {
    double k_plus = 0.0;   // +infinity for super-algebraic tails
    double k_minus = 0.0;  // +infinity for super-algebraic tails
    double phi_plus_00 = 0.0;
    double phi_minus_00 = 0.0;
    bool a2_excluded = false;  // true when k = infinity (tails close too fast)
};

struct RegFnDescriptor {
    RegFnId id = RegFnId::smooth_sqrt;
    DecayData decay;
};

/// Build the descriptor for a named family.
RegFnDescriptor make_regfn(RegFnId id);

/// Parse a config-file name ("smooth_sqrt", "goldbeter_koshland", "arctan",
/// "logistic") into a descriptor.
RegFnDescriptor make_regfn(const std::string& name);

/// Human-readable family name (inverse of the string factory).
std::string regfn_name(RegFnId id);

/// Evaluate phi(s, eps).  Strictly inside (0,1) for finite s.
/// goldbeter_koshland uses its closed singular-limit form at eps = 0; the
/// other families ignore eps.  Throws DomainError on non-finite input or
/// eps < 0.
double eval(const RegFnDescriptor& fn, double s, double eps);

/// Analytic d phi / d s (> 0 for all finite s, up to floating-point
/// representability of the logistic tail).
double deriv_s(const RegFnDescriptor& fn, double s, double eps);

/// Decay metadata (k+, k-, phi+(0,0), phi-(0,0), A2-excluded flag).
DecayData decay_data(const RegFnDescriptor& fn);

}  // namespace foldlab

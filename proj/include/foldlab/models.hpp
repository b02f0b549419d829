#pragma once

// Piecewise-smooth planar models with switching manifold {y = 0}: the
// visible-fold normal form and the dry-friction oscillator, plus
// classification of switching-manifold points, the Filippov sliding field,
// and assembly of the regularized smooth field phi(y/eps) Z+ + (1-phi) Z-.

#include <functional>
#include <optional>

#include "foldlab/common.hpp"
#include "foldlab/regfn.hpp"

namespace foldlab {

/// Smooth planar field with analytic Jacobian and parameter derivative.
/// alpha enters as a plain runtime parameter so continuation can vary it
/// without rebuilding the model.
struct SmoothField2D {
    std::function<Vec2(double x, double y, double alpha)> eval;
    std::function<Mat2(double x, double y, double alpha)> jacobian;
    std::function<Vec2(double x, double y, double alpha)> d_alpha;
};

/// Scalar plane function with analytic partials (building block for the
/// normal-form perturbations f and g).
struct ScalarField {
    std::function<double(double x, double y)> eval;
    std::function<double(double x, double y)> dx;
    std::function<double(double x, double y)> dy;

    static ScalarField zero() {
        return {[](double, double) { return 0.0; },
                [](double, double) { return 0.0; },
                [](double, double) { return 0.0; }};
    }
};

/// Two smooth fields glued along the switching manifold {y = 0};
/// Z+ governs y > 0, Z- governs y < 0.
struct PwsModel {
    SmoothField2D z_plus;
    SmoothField2D z_minus;
};

enum class SigmaTag { Crossing, Sliding, Tangency };
enum class TangencyKind { VisibleFold, Other };

struct SigmaClass {
    SigmaTag tag = SigmaTag::Crossing;
    std::optional<TangencyKind> tangency_kind;
};

/// Friction-law parameters: mu_+(y) = mu_m + (mu_s - mu_m) exp(-rho y) + c y.
/// The constraint c_fric in (0, rho (mu_s - mu_m)) guarantees an interior
/// minimum y0 of mu_+, the engine of the subcritical Hopf bifurcation.
struct FrictionParams {
    double mu_s = 1.0;
    double mu_m = 0.5;
    double rho = 4.0;
    double c_fric = 0.85;

    void validate() const;
};

/// Derived friction quantities: the minimum location y0 of mu_+ (closed
/// form), its second and third derivatives there, and the singular-limit
/// Hopf parameter alpha_H = y0.
struct FrictionProps {
    double y0 = 0.0;
    double mu_pp = 0.0;
    double mu_ppp = 0.0;
    double alpha_hopf = 0.0;
    bool subcritical = false;  // mu_ppp < 0
};

/// Visible-fold normal form Z+ = (1 + f, 2x + y g), Z- = (0, 1).
/// Requires f(0,0) = 0 so the fold sits at the origin.
PwsModel make_normal_form(const ScalarField& f, const ScalarField& g);

/// Normal form with f = g = 0.
PwsModel make_normal_form();

/// Stick-slip friction oscillator in relative coordinates:
/// Z+ = (y - alpha, -x - mu_+(y)), Z- = (y - alpha, -x + mu_+(-y)).
/// Both half-fields derive from the same stored mu_+, which enforces the
/// odd-reflection structure of the friction law by construction.
PwsModel make_friction(const FrictionParams& params);

FrictionProps friction_props(const FrictionParams& params);

/// The friction law itself (exposed for diagnostics/tests).
double friction_mu_plus(const FrictionParams& params, double y);
double friction_mu_plus_deriv(const FrictionParams& params, double y);

/// Classify the manifold point (x, 0): crossing, sliding, or tangency
/// (visible fold when Z+h = 0, Z+(Z+h) > 0, Z-h > 0).  Sign tests use an
/// absolute tolerance of 1e-10 -- inputs are analytic evaluations.
SigmaClass classify_sigma_point(const PwsModel& model, double x, double alpha);

/// Filippov sliding drift at (x, 0): solve lambda Z+h + (1-lambda) Z-h = 0
/// and return the matching convex combination of the x-components.
/// Throws DomainError when the point is not in the sliding region.
double filippov_drift(const PwsModel& model, double x, double alpha);

/// The Filippov convex coefficient lambda at a sliding point.
double filippov_lambda(const PwsModel& model, double x, double alpha);

/// Smooth field phi(y/eps, eps) Z+ + (1 - phi) Z- with the exact chain-rule
/// Jacobian (including the (dphi/ds)/eps layer term).  eps must be > 0; the
/// eps = 0 limit is handled by classify/filippov, not by a smooth field.
SmoothField2D assemble_regularized(const PwsModel& model, const RegFnDescriptor& fn,
                                   double eps);

}  // namespace foldlab

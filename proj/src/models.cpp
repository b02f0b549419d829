#include "foldlab/models.hpp"

#include <cmath>

namespace foldlab {

namespace {

constexpr double kSignTol = 1e-10;  // absolute tolerance for Lie-derivative sign tests

// Lie derivative of h(x,y) = y along the field: second component of F.
double lie_h(const SmoothField2D& f, double x, double y, double alpha) {
    return f.eval(x, y, alpha).y;
}

// Second Lie derivative Z(Zh) = grad(F2) . F, from the analytic Jacobian.
double lie2_h(const SmoothField2D& f, double x, double y, double alpha) {
    const Vec2 F = f.eval(x, y, alpha);
    const Mat2 J = f.jacobian(x, y, alpha);
    return J.a21 * F.x + J.a22 * F.y;
}

}  // namespace

void FrictionParams::validate() const {
    if (!(mu_s > 0.0) || !(mu_m > 0.0) || !(rho > 0.0) || !(c_fric > 0.0)) {
        throw ConfigError("friction params must be positive");
    }
    if (!(mu_s > mu_m)) throw ConfigError("friction: need mu_s > mu_m");
    if (!(c_fric < rho * (mu_s - mu_m))) {
        throw ConfigError("friction: need c_fric < rho (mu_s - mu_m) for an interior minimum");
    }
}

PwsModel make_normal_form(const ScalarField& f, const ScalarField& g) {
    if (std::abs(f.eval(0.0, 0.0)) > 1e-14) {
        throw ConfigError("normal form: f(0,0) must vanish (fold at the origin)");
    }
    PwsModel m;
    m.z_plus.eval = [f, g](double x, double y, double) -> Vec2 {
        return {1.0 + f.eval(x, y), 2.0 * x + y * g.eval(x, y)};
    };
    m.z_plus.jacobian = [f, g](double x, double y, double) -> Mat2 {
        return {f.dx(x, y), f.dy(x, y),
                2.0 + y * g.dx(x, y), g.eval(x, y) + y * g.dy(x, y)};
    };
    m.z_plus.d_alpha = [](double, double, double) -> Vec2 { return {0.0, 0.0}; };

    m.z_minus.eval = [](double, double, double) -> Vec2 { return {0.0, 1.0}; };
    m.z_minus.jacobian = [](double, double, double) -> Mat2 { return {0, 0, 0, 0}; };
    m.z_minus.d_alpha = [](double, double, double) -> Vec2 { return {0.0, 0.0}; };
    return m;
}

PwsModel make_normal_form() { return make_normal_form(ScalarField::zero(), ScalarField::zero()); }

double friction_mu_plus(const FrictionParams& p, double y) {
    return p.mu_m + (p.mu_s - p.mu_m) * std::exp(-p.rho * y) + p.c_fric * y;
}

double friction_mu_plus_deriv(const FrictionParams& p, double y) {
    return -p.rho * (p.mu_s - p.mu_m) * std::exp(-p.rho * y) + p.c_fric;
}

PwsModel make_friction(const FrictionParams& params) {
    params.validate();
    const FrictionParams p = params;
    PwsModel m;
    m.z_plus.eval = [p](double x, double y, double alpha) -> Vec2 {
        return {y - alpha, -x - friction_mu_plus(p, y)};
    };
    m.z_plus.jacobian = [p](double, double y, double) -> Mat2 {
        return {0.0, 1.0, -1.0, -friction_mu_plus_deriv(p, y)};
    };
    m.z_plus.d_alpha = [](double, double, double) -> Vec2 { return {-1.0, 0.0}; };

    // Z- mirrors the friction law: mu(y) = -mu_+(-y) for y < 0.
    m.z_minus.eval = [p](double x, double y, double alpha) -> Vec2 {
        return {y - alpha, -x + friction_mu_plus(p, -y)};
    };
    m.z_minus.jacobian = [p](double, double y, double) -> Mat2 {
        return {0.0, 1.0, -1.0, -friction_mu_plus_deriv(p, -y)};
    };
    m.z_minus.d_alpha = [](double, double, double) -> Vec2 { return {-1.0, 0.0}; };
    return m;
}

FrictionProps friction_props(const FrictionParams& p) {
    p.validate();
    FrictionProps out;
    out.y0 = -std::log(p.c_fric / (p.rho * (p.mu_s - p.mu_m))) / p.rho;
    out.mu_pp = p.rho * p.c_fric;
    out.mu_ppp = -p.rho * p.rho * p.c_fric;
    out.alpha_hopf = out.y0;
    out.subcritical = out.mu_ppp < 0.0;
    return out;
}

SigmaClass classify_sigma_point(const PwsModel& model, double x, double alpha) {
    const double lp = lie_h(model.z_plus, x, 0.0, alpha);
    const double lm = lie_h(model.z_minus, x, 0.0, alpha);
    SigmaClass out;
    if (std::abs(lp) <= kSignTol || std::abs(lm) <= kSignTol) {
        out.tag = SigmaTag::Tangency;
        const bool visible_fold = std::abs(lp) <= kSignTol &&
                                  lie2_h(model.z_plus, x, 0.0, alpha) > kSignTol &&
                                  lm > kSignTol;
        out.tangency_kind = visible_fold ? TangencyKind::VisibleFold : TangencyKind::Other;
        return out;
    }
    out.tag = (lp * lm > 0.0) ? SigmaTag::Crossing : SigmaTag::Sliding;
    return out;
}

double filippov_lambda(const PwsModel& model, double x, double alpha) {
    const SigmaClass cls = classify_sigma_point(model, x, alpha);
    if (cls.tag != SigmaTag::Sliding) {
        throw DomainError("filippov: point (" + std::to_string(x) + ", 0) is not sliding");
    }
    const double lp = lie_h(model.z_plus, x, 0.0, alpha);
    const double lm = lie_h(model.z_minus, x, 0.0, alpha);
    return lm / (lm - lp);  // lambda Z+h + (1-lambda) Z-h = 0
}

double filippov_drift(const PwsModel& model, double x, double alpha) {
    const double lambda = filippov_lambda(model, x, alpha);
    const double fp = model.z_plus.eval(x, 0.0, alpha).x;
    const double fm = model.z_minus.eval(x, 0.0, alpha).x;
    return lambda * fp + (1.0 - lambda) * fm;
}

SmoothField2D assemble_regularized(const PwsModel& model, const RegFnDescriptor& fn,
                                   double eps) {
    if (!(eps > 0.0)) {
        throw DomainError("assemble_regularized: eps must be > 0 (eps = 0 is the PWS limit)");
    }
    const PwsModel m = model;
    SmoothField2D f;
    f.eval = [m, fn, eps](double x, double y, double alpha) -> Vec2 {
        const double p = eval(fn, y / eps, eps);
        const Vec2 zp = m.z_plus.eval(x, y, alpha);
        const Vec2 zm = m.z_minus.eval(x, y, alpha);
        return p * zp + (1.0 - p) * zm;
    };
    f.jacobian = [m, fn, eps](double x, double y, double alpha) -> Mat2 {
        const double p = eval(fn, y / eps, eps);
        const double dp = deriv_s(fn, y / eps, eps) / eps;  // d phi / d y
        const Vec2 zp = m.z_plus.eval(x, y, alpha);
        const Vec2 zm = m.z_minus.eval(x, y, alpha);
        const Mat2 jp = m.z_plus.jacobian(x, y, alpha);
        const Mat2 jm = m.z_minus.jacobian(x, y, alpha);
        Mat2 J = jp * p + jm * (1.0 - p);
        // Layer term: d/dy picks up phi'(y/eps)/eps (Z+ - Z-).
        J.a12 += dp * (zp.x - zm.x);
        J.a22 += dp * (zp.y - zm.y);
        return J;
    };
    f.d_alpha = [m, fn, eps](double x, double y, double alpha) -> Vec2 {
        const double p = eval(fn, y / eps, eps);
        return p * m.z_plus.d_alpha(x, y, alpha) + (1.0 - p) * m.z_minus.d_alpha(x, y, alpha);
    };
    return f;
}

}  // namespace foldlab

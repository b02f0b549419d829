#include "foldlab/regfn.hpp"

#include <cmath>
#include <limits>

namespace foldlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(double s, double eps) {
    if (!std::isfinite(s) || !std::isfinite(eps)) {
        throw DomainError("regfn: non-finite argument");
    }
    if (eps < 0.0) throw DomainError("regfn: eps must be >= 0");
}

// Goldbeter-Koshland switch, two-argument form.  Raw expression:
//
//   A = 4 + s^2 (1+eps)^2 + 4 eps s,   B = sqrt(A)
//   N = 2 + 2 eps + eps s (1+eps) + eps B
//   D = (2 - s + eps s + B)(1+eps)
//   phi = N / D
//
// Rearrangements used for large |s| (documented per the stability decision):
//   s >= 0: D has -s + B cancellation; with B^2 - s^2(1-eps)^2
//           = 4 (1 + eps s + eps s^2) we write
//           D = (1+eps) (2 + 4 (1 + eps s + eps s^2) / (B + s (1-eps))).
//   s <  0: N has eps*s + eps*B cancellation; with B^2 - s^2(1+eps)^2
//           = 4 (1 + eps s) we write
//           N = 2 + 2 eps + 4 eps (1 + eps s) / (B - s (1+eps)).
double gk_eval(double s, double eps) {
    if (eps == 0.0) {
        // Singular-limit closed form 2 / (2 - s + sqrt(s^2 + 4)); for s > 0
        // use the conjugate to avoid -s + sqrt(s^2+4) cancellation.
        const double r = std::hypot(s, 2.0);
        if (s > 0.0) return (s + r) / (s + r + 2.0);
        return 2.0 / (2.0 - s + r);
    }
    const double op = 1.0 + eps;
    const double A = 4.0 + s * s * op * op + 4.0 * eps * s;
    const double B = std::sqrt(A);
    double N, D;
    if (s >= 0.0) {
        N = 2.0 + 2.0 * eps + eps * s * op + eps * B;
        D = op * (2.0 + 4.0 * (1.0 + eps * s + eps * s * s) / (B + s * (1.0 - eps)));
    } else {
        N = 2.0 + 2.0 * eps + 4.0 * eps * (1.0 + eps * s) / (B - s * op);
        D = op * (2.0 - s + eps * s + B);
    }
    return N / D;
}

double gk_deriv(double s, double eps) {
    if (eps == 0.0) {
        // d/ds [2 / (2 - s + r)], r = sqrt(s^2+4):  2 (1 - s/r) / (2 - s + r)^2.
        const double r = std::hypot(s, 2.0);
        if (s > 0.0) {
            // 1 - s/r = 4 / (r (s + r)); denominator 2 - s + r = 2 + 4/(s+r).
            const double den = 2.0 + 4.0 / (s + r);
            return 8.0 / (den * den * r * (s + r));
        }
        const double den = 2.0 - s + r;
        return 2.0 * (1.0 - s / r) / (den * den);
    }
    const double op = 1.0 + eps;
    const double A = 4.0 + s * s * op * op + 4.0 * eps * s;
    const double B = std::sqrt(A);
    const double Bp = (s * op * op + 2.0 * eps) / B;
    const double N = 2.0 + 2.0 * eps + eps * s * op + eps * B;
    const double D = op * (2.0 - s + eps * s + B);
    const double Np = eps * op + eps * Bp;
    const double Dp = op * (eps - 1.0 + Bp);
    return (Np * D - N * Dp) / (D * D);
}

}  // namespace

RegFnDescriptor make_regfn(RegFnId id) {
    RegFnDescriptor fn;
    fn.id = id;
    switch (id) {
        case RegFnId::smooth_sqrt:
            fn.decay = {2.0, 2.0, 0.25, 0.25, false};
            break;
        case RegFnId::goldbeter_koshland:
            fn.decay = {1.0, 1.0, 1.0, 1.0, false};
            break;
        case RegFnId::arctan:
            fn.decay = {1.0, 1.0, 1.0 / kPi, 1.0 / kPi, false};
            break;
        case RegFnId::logistic:
            fn.decay = {kInf, kInf, 0.0, 0.0, true};
            break;
    }
    return fn;
}

RegFnDescriptor make_regfn(const std::string& name) {
    if (name == "smooth_sqrt") return make_regfn(RegFnId::smooth_sqrt);
    if (name == "goldbeter_koshland") return make_regfn(RegFnId::goldbeter_koshland);
    if (name == "arctan") return make_regfn(RegFnId::arctan);
    if (name == "logistic") return make_regfn(RegFnId::logistic);
    throw ConfigError("unknown regularization function: " + name);
}

std::string regfn_name(RegFnId id) {
    switch (id) {
        case RegFnId::smooth_sqrt: return "smooth_sqrt";
        case RegFnId::goldbeter_koshland: return "goldbeter_koshland";
        case RegFnId::arctan: return "arctan";
        case RegFnId::logistic: return "logistic";
    }
    throw DomainError("regfn_name: bad id");
}

double eval(const RegFnDescriptor& fn, double s, double eps) {
    check_args(s, eps);
    switch (fn.id) {
        case RegFnId::smooth_sqrt: {
            // 1/2 (1 + s / sqrt(s^2+1)); conjugate form on s > 0 keeps the
            // upper tail 1 - phi = 1 / (2 r (r + s)) fully accurate.
            const double r = std::hypot(s, 1.0);
            if (s > 0.0) return 1.0 - 1.0 / (2.0 * r * (r + s));
            return 0.5 * (1.0 + s / r);
        }
        case RegFnId::goldbeter_koshland:
            return gk_eval(s, eps);
        case RegFnId::arctan:
            return 0.5 + std::atan(s) / kPi;
        case RegFnId::logistic:
            return 1.0 / (1.0 + std::exp(-s));
    }
    throw DomainError("eval: bad regfn id");
}

double deriv_s(const RegFnDescriptor& fn, double s, double eps) {
    check_args(s, eps);
    switch (fn.id) {
        case RegFnId::smooth_sqrt: {
            const double r2 = s * s + 1.0;
            return 0.5 / (r2 * std::sqrt(r2));
        }
        case RegFnId::goldbeter_koshland:
            return gk_deriv(s, eps);
        case RegFnId::arctan:
            return 1.0 / (kPi * (1.0 + s * s));
        case RegFnId::logistic: {
            // exp(-|s|) form avoids overflow; underflows to 0 past |s| ~ 745,
            // the double-precision representability limit of the tail.
            const double e = std::exp(-std::abs(s));
            const double q = 1.0 + e;
            return e / (q * q);
        }
    }
    throw DomainError("deriv_s: bad regfn id");
}

DecayData decay_data(const RegFnDescriptor& fn) { return fn.decay; }

}  // namespace foldlab

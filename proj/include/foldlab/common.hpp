#pragma once

// Small shared vocabulary for the toolkit: 2-vectors/2x2 matrices, error
// taxonomy, and a couple of numeric helpers used across modules.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace foldlab {

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

/// Invalid user input (config values, malformed parameters).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Domain violation in a numeric routine (bad argument, non-finite input).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Explicit integrator step underflow; caller should switch to the implicit method.
struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Orbit left the admissible region (chart box, v -> 0 blow-up, overflow).
struct EscapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its residual target.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Singular linear system / degenerate bifurcation condition.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested object (return, cycle, bifurcation point) does not exist.
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Plane vectors and matrices
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
};

/// Solve A u = b for a 2x2 system; throws SingularityError when |det| is
/// negligible relative to the matrix scale.
inline Vec2 solve2x2(const Mat2& A, const Vec2& b) {
    const double d = A.det();
    const double scale = std::abs(A.a11 * A.a22) + std::abs(A.a12 * A.a21);
    if (std::abs(d) <= 1e-14 * std::max(scale, 1e-300)) {
        throw SingularityError("solve2x2: singular matrix, det = " + std::to_string(d));
    }
    return {(b.x * A.a22 - b.y * A.a12) / d, (b.y * A.a11 - b.x * A.a21) / d};
}

// ---------------------------------------------------------------------------
// Least squares line fit (used by every scaling diagnostic)
// ---------------------------------------------------------------------------

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares fit y = slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw DomainError("fit_line: need >= 2 matched points");
    }
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) <= 1e-300) throw SingularityError("fit_line: degenerate abscissae");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = out.slope * xs[i] + out.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

/// True when every component is finite.
inline bool finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace foldlab

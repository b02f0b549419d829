#include "foldlab/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace foldlab {

namespace {

using Arr = std::array<double, kMaxOdeDim>;

// ---------------------------------------------------------------------------
// Small dense linear algebra (dim <= 4)
// ---------------------------------------------------------------------------

// Solve A x = b in place by Gaussian elimination with partial pivoting.
// A is row-major n x n; b holds the solution on return.
bool lu_solve_small(double* A, double* b, int n) {
    int piv[kMaxOdeDim];
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double mag = std::abs(A[piv[col] * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double m = std::abs(A[piv[r] * n + col]);
            if (m > mag) {
                mag = m;
                best = r;
            }
        }
        if (mag == 0.0 || !std::isfinite(mag)) return false;
        std::swap(piv[col], piv[best]);
        const int pc = piv[col];
        for (int r = col + 1; r < n; ++r) {
            const int pr = piv[r];
            const double f = A[pr * n + col] / A[pc * n + col];
            A[pr * n + col] = 0.0;
            for (int k = col + 1; k < n; ++k) A[pr * n + k] -= f * A[pc * n + k];
            b[pr] -= f * b[pc];
        }
    }
    double x[kMaxOdeDim] = {};
    for (int row = n - 1; row >= 0; --row) {
        const int pr = piv[row];
        double s = b[pr];
        for (int k = row + 1; k < n; ++k) s -= A[pr * n + k] * x[k];
        x[row] = s / A[pr * n + row];
    }
    std::memcpy(b, x, sizeof(double) * static_cast<std::size_t>(n));
    return true;
}

// Weighted RMS norm of err with scale sc_i = atol + rtol * max(|a_i|, |b_i|).
double error_norm(const double* err, const double* a, const double* b, int dim,
                  double rtol, double atol) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double q = err[i] / sc;
        s += q * q;
    }
    return std::sqrt(s / dim);
}

// ---------------------------------------------------------------------------
// Stepper interface
// ---------------------------------------------------------------------------

class StepperBase {
  public:
    virtual ~StepperBase() = default;
    /// Attempt one step of at most h_cap; returns true when a step was
    /// accepted (rec filled, internal t/y advanced).  False = rejected
    /// (internal h shrunk; call again).
    virtual bool try_step(double h_cap, StepRecord& rec) = 0;
    virtual void reset(double t, const double* y, double h0) = 0;
    virtual double t() const = 0;
    virtual const double* y() const = 0;
    virtual double h_next() const = 0;
    virtual long n_rhs() const = 0;
};

// ---------------------------------------------------------------------------
// Explicit embedded 5(4) pair with quartic dense output
// ---------------------------------------------------------------------------

class Dopri5Stepper final : public StepperBase {
  public:
    Dopri5Stepper(const RhsFn& rhs, int dim, double rtol, double atol, double h_fixed)
        : rhs_(rhs), dim_(dim), rtol_(rtol), atol_(atol), h_fixed_(h_fixed) {}

    void reset(double t, const double* y, double h0) override {
        t_ = t;
        std::memcpy(y_.data(), y, sizeof(double) * static_cast<std::size_t>(dim_));
        rhs_(t_, y_.data(), k_[0].data());
        ++nrhs_;
        h_ = (h_fixed_ > 0.0) ? h_fixed_ : (h0 > 0.0 ? h0 : init_step());
        err_old_ = 1e-4;
        reject_ = false;
    }

    bool try_step(double h_cap, StepRecord& rec) override {
        double h = std::min(h_, h_cap);
        if (h_fixed_ > 0.0) h = std::min(h_fixed_, h_cap);
        Arr y1{}, err{};
        // stages 2..7 (k1 is FSAL from the previous step)
        for (int s = 1; s < 7; ++s) {
            Arr ys{};
            for (int i = 0; i < dim_; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += kA[s][j] * k_[j][i];
                ys[i] = y_[i] + h * acc;
            }
            rhs_(t_ + kC[s] * h, ys.data(), k_[s].data());
            ++nrhs_;
            if (s == 6) y1 = ys;  // stage 7 abscissa is y1 (FSAL layout)
        }
        for (int i = 0; i < dim_; ++i) {
            double e = 0.0;
            for (int j = 0; j < 7; ++j) e += kE[j] * k_[j][i];
            err[i] = h * e;
        }
        const double en = error_norm(err.data(), y_.data(), y1.data(), dim_, rtol_, atol_);
        if (h_fixed_ <= 0.0 && (en > 1.0 || !std::isfinite(en))) {
            const double shrink = std::isfinite(en)
                                      ? std::max(0.1, 0.9 * std::pow(en, -0.2))
                                      : 0.1;
            h_ = h * std::min(shrink, 1.0);
            reject_ = true;
            return false;
        }
        // dense output
        rec.t0 = t_;
        rec.h = h;
        for (int i = 0; i < dim_; ++i) {
            const double dy = y1[i] - y_[i];
            const double bspl = h * k_[0][i] - dy;
            const double r2 = dy, r3 = bspl;
            const double r4 = dy - h * k_[6][i] - bspl;
            double r5 = 0.0;
            for (int j = 0; j < 7; ++j) r5 += kD[j] * k_[j][i];
            r5 *= h;
            rec.c[i][0] = y_[i];
            rec.c[i][1] = r2 + r3;
            rec.c[i][2] = -r3 + r4 + r5;
            rec.c[i][3] = -r4 - 2.0 * r5;
            rec.c[i][4] = r5;
        }
        // PI controller
        if (h_fixed_ <= 0.0) {
            const double en_cl = std::max(en, 1e-10);
            double grow = 0.9 * std::pow(en_cl, -0.17) * std::pow(err_old_, 0.04);
            grow = std::clamp(grow, 0.2, 10.0);
            if (reject_) grow = std::min(grow, 1.0);
            h_ = h * grow;
            err_old_ = std::max(en, 1e-4);
        }
        reject_ = false;
        t_ += h;
        y_ = y1;
        k_[0] = k_[6];  // FSAL
        return true;
    }

    double t() const override { return t_; }
    const double* y() const override { return y_.data(); }
    double h_next() const override { return h_; }
    long n_rhs() const override { return nrhs_; }

  private:
    double init_step() {
        // Conventional automatic first step: compare solution and derivative
        // scales, then probe with one Euler step.
        Arr f0 = k_[0];
        double d0 = 0, d1 = 0;
        for (int i = 0; i < dim_; ++i) {
            const double sc = atol_ + rtol_ * std::abs(y_[i]);
            d0 += (y_[i] / sc) * (y_[i] / sc);
            d1 += (f0[i] / sc) * (f0[i] / sc);
        }
        d0 = std::sqrt(d0 / dim_);
        d1 = std::sqrt(d1 / dim_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        Arr ye{}, f1{};
        for (int i = 0; i < dim_; ++i) ye[i] = y_[i] + h0 * f0[i];
        rhs_(t_ + h0, ye.data(), f1.data());
        ++nrhs_;
        double d2 = 0;
        for (int i = 0; i < dim_; ++i) {
            const double sc = atol_ + rtol_ * std::abs(y_[i]);
            const double q = (f1[i] - f0[i]) / sc;
            d2 += q * q;
        }
        d2 = std::sqrt(d2 / dim_) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                        : std::pow(0.01 / dm, 0.2);
        return std::min(100.0 * h0, h1);
    }

    static constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double kA[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    static constexpr double kE[7] = {71.0 / 57600,    0.0,        -71.0 / 16695, 71.0 / 1920,
                                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
    static constexpr double kD[7] = {-12715105075.0 / 11282082432.0,
                                     0.0,
                                     87487479700.0 / 32700410799.0,
                                     -10690763975.0 / 1880347072.0,
                                     701980252875.0 / 199316789632.0,
                                     -1453857185.0 / 822651844.0,
                                     69997945.0 / 29380423.0};

    RhsFn rhs_;
    int dim_;
    double rtol_, atol_, h_fixed_;
    double t_ = 0.0, h_ = 0.0, err_old_ = 1e-4;
    bool reject_ = false;
    Arr y_{};
    std::array<Arr, 7> k_{};
    long nrhs_ = 0;
};

// ---------------------------------------------------------------------------
// L-stable singly diagonally implicit order 3 (three stages), embedded
// order 2, cubic Hermite dense output
// ---------------------------------------------------------------------------

class Sdirk3Stepper final : public StepperBase {
  public:
    Sdirk3Stepper(const RhsFn& rhs, const JacFn& jac, int dim, double rtol, double atol,
                  double h_fixed)
        : rhs_(rhs), jac_(jac), dim_(dim), rtol_(rtol), atol_(atol), h_fixed_(h_fixed) {
        const double g = kGamma;
        b_[0] = -(6.0 * g * g - 16.0 * g + 1.0) / 4.0;
        b_[1] = (6.0 * g * g - 20.0 * g + 5.0) / 4.0;
        b_[2] = g;
        c_[0] = g;
        c_[1] = 0.5 * (1.0 + g);
        c_[2] = 1.0;
        bhat_[1] = (1.0 - 2.0 * g) / (1.0 - g);
        bhat_[0] = 1.0 - bhat_[1];
        bhat_[2] = 0.0;
    }

    void reset(double t, const double* y, double h0) override {
        t_ = t;
        std::memcpy(y_.data(), y, sizeof(double) * static_cast<std::size_t>(dim_));
        rhs_(t_, y_.data(), fend_.data());
        ++nrhs_;
        h_ = h0 > 0.0 ? h0 : 1e-6;
        if (h_fixed_ > 0.0) h_ = h_fixed_;
    }

    bool try_step(double h_cap, StepRecord& rec) override {
        double h = std::min(h_, h_cap);
        if (h_fixed_ > 0.0) h = std::min(h_fixed_, h_cap);
        std::array<Arr, 3> k{};
        Arr base{};
        // f at the step start for the Hermite interpolant (stiffly accurate:
        // previous step's last stage).
        const Arr f0 = fend_;
        bool ok = true;
        for (int s = 0; s < 3 && ok; ++s) {
            for (int i = 0; i < dim_; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += a_low(s, j) * k[j][i];
                base[i] = y_[i] + h * acc;
            }
            // initial guess: previous stage slope (or f0)
            k[s] = (s == 0) ? f0 : k[s - 1];
            ok = newton_stage(t_ + c_[s] * h, h, base, k[s]);
        }
        if (!ok) {
            h_ = 0.5 * h;
            return false;
        }
        Arr y1{}, err{};
        for (int i = 0; i < dim_; ++i) {
            y1[i] = y_[i] + h * (b_[0] * k[0][i] + b_[1] * k[1][i] + b_[2] * k[2][i]);
            err[i] = h * ((b_[0] - bhat_[0]) * k[0][i] + (b_[1] - bhat_[1]) * k[1][i] +
                          (b_[2] - bhat_[2]) * k[2][i]);
        }
        // The embedded pair is not stiffly accurate, so the raw difference
        // retains the fast components and would cap h at O(1/lambda).  Damp
        // it through the iteration matrix (the usual (I - h gamma J)^{-1}
        // filter); when the filtered estimate still rejects, filter once
        // more before deciding -- the double application kills the stiff
        // residue quadratically while leaving nonstiff estimates untouched.
        double Jm[kMaxOdeDim * kMaxOdeDim];
        double M[kMaxOdeDim * kMaxOdeDim];
        double Mc[kMaxOdeDim * kMaxOdeDim];
        jac_(t_ + h, y1.data(), Jm);
        for (int r = 0; r < dim_; ++r)
            for (int col = 0; col < dim_; ++col)
                M[r * dim_ + col] = (r == col ? 1.0 : 0.0) - h * kGamma * Jm[r * dim_ + col];
        std::memcpy(Mc, M, sizeof M);
        if (!lu_solve_small(Mc, err.data(), dim_)) {
            h_ = 0.5 * h;
            return false;
        }
        double en = error_norm(err.data(), y_.data(), y1.data(), dim_, rtol_, atol_);
        if (en > 1.0 && std::isfinite(en)) {
            std::memcpy(Mc, M, sizeof M);
            if (lu_solve_small(Mc, err.data(), dim_)) {
                en = error_norm(err.data(), y_.data(), y1.data(), dim_, rtol_, atol_);
            }
        }
        if (h_fixed_ <= 0.0 && (en > 1.0 || !std::isfinite(en))) {
            const double shrink = std::isfinite(en)
                                      ? std::max(0.1, 0.9 * std::pow(en, -1.0 / 3.0))
                                      : 0.1;
            h_ = h * std::min(shrink, 1.0);
            return false;
        }
        // stiffly accurate: f(t+h, y1) = k3
        const Arr f1 = k[2];
        rec.t0 = t_;
        rec.h = h;
        for (int i = 0; i < dim_; ++i) {
            const double dy = y1[i] - y_[i];
            rec.c[i][0] = y_[i];
            rec.c[i][1] = h * f0[i];
            rec.c[i][2] = 3.0 * dy - h * (2.0 * f0[i] + f1[i]);
            rec.c[i][3] = -2.0 * dy + h * (f0[i] + f1[i]);
            rec.c[i][4] = 0.0;
        }
        if (h_fixed_ <= 0.0) {
            const double en_cl = std::max(en, 1e-10);
            h_ = h * std::clamp(0.9 * std::pow(en_cl, -1.0 / 3.0), 0.2, 5.0);
        }
        t_ += h;
        y_ = y1;
        fend_ = f1;
        return true;
    }

    double t() const override { return t_; }
    const double* y() const override { return y_.data(); }
    double h_next() const override { return h_; }
    long n_rhs() const override { return nrhs_; }

    static constexpr double kGamma = 0.4358665215084590;

  private:
    double a_low(int s, int j) const {
        // strictly lower-triangular part of the stage matrix
        if (s == 1 && j == 0) return 0.5 * (1.0 - kGamma);
        if (s == 2) return b_[j];  // stiffly accurate last row
        return 0.0;
    }

    // Solve k = f(ts, base + h*gamma*k) by Newton with the analytic
    // iteration matrix I - h*gamma*J.
    bool newton_stage(double ts, double h, const Arr& base, Arr& k) {
        Arr ystage{}, f{}, rhsv{};
        double Jm[kMaxOdeDim * kMaxOdeDim];
        double M[kMaxOdeDim * kMaxOdeDim];
        for (int it = 0; it < 15; ++it) {
            for (int i = 0; i < dim_; ++i) ystage[i] = base[i] + h * kGamma * k[i];
            rhs_(ts, ystage.data(), f.data());
            ++nrhs_;
            jac_(ts, ystage.data(), Jm);
            for (int r = 0; r < dim_; ++r) {
                for (int col = 0; col < dim_; ++col) {
                    M[r * dim_ + col] =
                        (r == col ? 1.0 : 0.0) - h * kGamma * Jm[r * dim_ + col];
                }
                rhsv[r] = f[r] - k[r];  // -F(k)
            }
            if (!lu_solve_small(M, rhsv.data(), dim_)) return false;
            double inc = 0.0, scale = 0.0, ysc = 0.0;
            for (int i = 0; i < dim_; ++i) {
                k[i] += rhsv[i];
                inc = std::max(inc, std::abs(rhsv[i]));
                scale = std::max(scale, std::abs(k[i]));
                ysc = std::max(ysc, std::abs(ystage[i]));
            }
            if (!std::isfinite(inc)) return false;
            // Converged when the increment is negligible absolutely or
            // against the step's error budget: a slope residual dk perturbs
            // the state by O(h dk).  An absolute cut alone is unreachable for
            // stiff systems, where rhs evaluation noise is amplified by the
            // Lipschitz constant.
            if (inc <= 1e-12 * (1.0 + scale) ||
                h * inc <= 0.01 * (atol_ + rtol_ * ysc)) {
                return true;
            }
        }
        return false;
    }

    RhsFn rhs_;
    JacFn jac_;
    int dim_;
    double rtol_, atol_, h_fixed_;
    double t_ = 0.0, h_ = 0.0;
    Arr y_{}, fend_{};
    double b_[3], c_[3], bhat_[3];
    long nrhs_ = 0;
};

// ---------------------------------------------------------------------------
// Dense polynomial utilities
// ---------------------------------------------------------------------------

double dense_eval_impl(const std::array<double, 5>& c, double th) {
    return c[0] + th * (c[1] + th * (c[2] + th * (c[3] + th * c[4])));
}

// ---------------------------------------------------------------------------
// Event machinery
// ---------------------------------------------------------------------------

struct EventScanner {
    const std::vector<EventSpec>* specs;
    const RhsFn* rhs;
    int dim;
    double event_tol;
    double deadband;
    double dead_until;  // hits before this time are suppressed

    struct Found {
        double t;
        Arr z;
        int spec_index;
        bool tangential;
        double dead_past = 0.0;  // suppress re-hits up to this absolute time
    };

    static double eval_g(const EventSpec& ev, const Arr& z) { return ev.g(z.data()); }

    void dense_state(const StepRecord& rec, double th, Arr& out) const {
        for (int i = 0; i < dim; ++i) out[i] = dense_eval_impl(rec.c[i], th);
    }

    // dG/dtheta by tight central difference (sign/tangency only).
    double dG(const StepRecord& rec, const EventSpec& ev, double th) const {
        const double d = 1e-7;
        const double a = std::clamp(th - d, 0.0, 1.0);
        const double b = std::clamp(th + d, 0.0, 1.0);
        Arr za{}, zb{};
        dense_state(rec, a, za);
        dense_state(rec, b, zb);
        return (eval_g(ev, zb) - eval_g(ev, za)) / (b - a);
    }

    // Illinois-safeguarded root of G on [a, b] with G(a) G(b) <= 0.
    double refine_root(const StepRecord& rec, const EventSpec& ev, double a, double b,
                       double ga, double gb) const {
        for (int it = 0; it < 80; ++it) {
            const double mid = (std::abs(gb - ga) > 0.0) ? b - gb * (b - a) / (gb - ga)
                                                         : 0.5 * (a + b);
            const double m = (mid > a && mid < b) ? mid : 0.5 * (a + b);
            Arr z{};
            dense_state(rec, m, z);
            const double gm = eval_g(ev, z);
            if (gm == 0.0 || b - a < 1e-15) return m;
            if ((ga < 0.0) != (gm < 0.0)) {
                b = m;
                gb = gm;
            } else {
                a = m;
                ga = gm;
            }
        }
        return 0.5 * (a + b);
    }

    // Newton-project the dense-output hit onto the true trajectory.
    void project(const EventSpec& ev, double& t, Arr& z) const {
        for (int it = 0; it < 3; ++it) {
            const double gv = eval_g(ev, z);
            double scale = 1.0;
            for (int i = 0; i < dim; ++i) scale = std::max(scale, std::abs(z[i]));
            if (std::abs(gv) <= event_tol * scale) return;
            Arr f{};
            (*rhs)(t, z.data(), f.data());
            // gdot = grad(g) . f by per-component finite differences
            double gdot = 0.0;
            for (int i = 0; i < dim; ++i) {
                const double hs = 1e-7 * (1.0 + std::abs(z[i]));
                Arr zp = z, zm = z;
                zp[i] += hs;
                zm[i] -= hs;
                gdot += (eval_g(ev, zp) - eval_g(ev, zm)) / (2.0 * hs) * f[i];
            }
            if (std::abs(gdot) < 1e-300) return;
            const double dt = -gv / gdot;
            for (int i = 0; i < dim; ++i) z[i] += f[i] * dt;
            t += dt;
        }
    }

    // Around a tangential hit |g| stays below the acceptance threshold over
    // the whole quadratic well, and inside that plateau the dense evaluation
    // of g is pure cancellation noise whose sign flips at random -- each
    // rescan would fire another phantom hit one deadband later.  Return the
    // well half-width sqrt(2 tol scale / g'') (doubled for margin) so the
    // caller can push the dead zone past the plateau.
    double well_halfwidth(const StepRecord& rec, const EventSpec& ev, double th_star,
                          const Arr& z_star) const {
        const double d = 1e-5;
        const double a = std::clamp(th_star - d, 0.0, 1.0);
        const double b = std::clamp(th_star + d, 0.0, 1.0);
        if (!(b > a)) return 0.0;
        const double g2 = std::abs(dG(rec, ev, b) - dG(rec, ev, a)) / (b - a) / (rec.h * rec.h);
        if (!(g2 > 1e-300) || !std::isfinite(g2)) return 0.0;
        double scale = 1.0;
        for (int i = 0; i < dim; ++i) scale = std::max(scale, std::abs(z_star[i]));
        return 2.0 * std::sqrt(2.0 * event_tol * scale / g2);
    }

    /// Earliest event hit inside one accepted step, or nullopt.
    std::optional<Found> scan(const StepRecord& rec) {
        std::optional<Found> best;
        const double t1 = rec.t0 + rec.h;
        if (t1 <= dead_until) return best;
        const double th_lo = std::clamp((dead_until - rec.t0) / rec.h, 0.0, 1.0);
        for (std::size_t si = 0; si < specs->size(); ++si) {
            const EventSpec& ev = (*specs)[si];
            // knot grid; sections are coordinate-linear so the quartic dense
            // polynomial has at most 4 roots -- 12 knots is comfortable.
            constexpr int K = 12;
            double th_prev = th_lo;
            Arr z{};
            dense_state(rec, th_prev, z);
            double g_prev = eval_g(ev, z);
            double g_absmin = std::abs(g_prev);
            double g_absmax = std::abs(g_prev);
            double th_absmin = th_prev;
            bool found_crossing = false;
            for (int j = 1; j <= K; ++j) {
                const double th = th_lo + (1.0 - th_lo) * j / K;
                dense_state(rec, th, z);
                const double g = eval_g(ev, z);
                if (std::abs(g) < g_absmin) {
                    g_absmin = std::abs(g);
                    th_absmin = th;
                }
                g_absmax = std::max(g_absmax, std::abs(g));
                const bool crossed = (g_prev < 0.0 && g >= 0.0) || (g_prev > 0.0 && g <= 0.0);
                if (crossed && g_prev != 0.0) {
                    found_crossing = true;
                    const double th_star = refine_root(rec, ev, th_prev, th, g_prev, g);
                    const double slope = dG(rec, ev, th_star);
                    const bool tangential = std::abs(slope / rec.h) <= 1e-6;
                    const bool dir_ok = tangential || ev.direction == 0 ||
                                        (ev.direction > 0 && slope > 0.0) ||
                                        (ev.direction < 0 && slope < 0.0);
                    if (dir_ok) {
                        Found f;
                        f.t = rec.t0 + th_star * rec.h;
                        dense_state(rec, th_star, f.z);
                        f.spec_index = static_cast<int>(si);
                        f.tangential = tangential;
                        project(ev, f.t, f.z);
                        f.dead_past =
                            tangential ? f.t + well_halfwidth(rec, ev, th_star, f.z) : f.t;
                        if (f.t > dead_until && (!best || f.t < best->t)) best = f;
                        if (best && best->t <= rec.t0 + th_prev * rec.h) break;
                    }
                }
                th_prev = th;
                g_prev = g;
            }
            // Grazing hunt: g dips near zero without crossing.  Only pay for
            // it when the knot scan saw |g| genuinely small -- in absolute
            // terms, or relative to the step's own g range (long steps can
            // straddle a deep dip whose knot values all clear the absolute
            // cut).
            if (!found_crossing && th_absmin > th_lo && th_absmin < 1.0 &&
                g_absmin <= std::max(1e-3, 0.25 * g_absmax)) {
                const double span = (1.0 - th_lo) / K;
                double a = std::max(th_lo, th_absmin - span);
                double b = std::min(1.0, th_absmin + span);
                double da = dG(rec, ev, a), db = dG(rec, ev, b);
                if ((da < 0.0) != (db < 0.0)) {
                    for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
                        const double m = 0.5 * (a + b);
                        const double dm = dG(rec, ev, m);
                        if ((da < 0.0) == (dm < 0.0)) {
                            a = m;
                            da = dm;
                        } else {
                            b = m;
                            db = dm;
                        }
                    }
                    const double th_star = 0.5 * (a + b);
                    Arr zs{};
                    dense_state(rec, th_star, zs);
                    double scale = 1.0;
                    for (int i = 0; i < dim; ++i) scale = std::max(scale, std::abs(zs[i]));
                    if (std::abs(eval_g(ev, zs)) <= event_tol * scale) {
                        Found f;
                        f.t = rec.t0 + th_star * rec.h;
                        f.z = zs;
                        f.spec_index = static_cast<int>(si);
                        f.tangential = true;
                        f.dead_past = f.t + well_halfwidth(rec, ev, th_star, zs);
                        if (f.t > dead_until && (!best || f.t < best->t)) best = f;
                    }
                }
            }
        }
        return best;
    }
};

// ---------------------------------------------------------------------------
// Integration driver
// ---------------------------------------------------------------------------

struct AutoPolicy {
    bool enabled = false;
    double eps = 0.0;  // layer scale; |y| is component 1
};

void check_tol(double tol) {
    if (!(tol >= 1e-13 && tol <= 1e-6)) {
        throw DomainError("integrate: tol must lie in [1e-13, 1e-6]");
    }
}

OrbitSegment run_integration(const RhsFn& rhs, const JacFn* jac, int dim, const double* z0,
                             double t_max, const std::vector<EventSpec>& events,
                             const OdeOptions& opts, bool implicit_only,
                             const AutoPolicy& policy, bool backward, bool has_tangent) {
    check_tol(opts.tol);
    if (!(t_max > 0.0)) throw DomainError("integrate: t_max must be > 0");
    if (dim < 1 || dim > kMaxOdeDim) throw DomainError("integrate: dim out of range");
    for (int i = 0; i < dim; ++i) {
        if (!std::isfinite(z0[i])) throw DomainError("integrate: non-finite initial state");
    }

    const double rtol = opts.tol;
    const double atol = 0.1 * opts.tol;
    const double h_max = opts.h_max > 0.0 ? opts.h_max : t_max;

    OrbitSegment out;
    out.dim = dim;
    out.backward = backward;
    out.has_tangent = has_tangent;
    out.times.push_back(0.0);
    Arr zinit{};
    std::memcpy(zinit.data(), z0, sizeof(double) * static_cast<std::size_t>(dim));
    out.states.push_back(zinit);

    Dopri5Stepper expl(rhs, dim, rtol, atol, opts.h_fixed);
    std::optional<Sdirk3Stepper> impl;
    if (jac) impl.emplace(rhs, *jac, dim, rtol, atol, opts.h_fixed);
    if (implicit_only && !impl) {
        throw DomainError("integrate_implicit: Jacobian required");
    }

    bool use_implicit = implicit_only;
    StepperBase* st = use_implicit ? static_cast<StepperBase*>(&*impl) : &expl;
    st->reset(0.0, z0, opts.h_init);

    EventScanner scanner;
    scanner.specs = &events;
    scanner.rhs = &rhs;
    scanner.dim = dim;
    scanner.event_tol = opts.event_tol;
    scanner.deadband = 1e-10 * std::max(1.0, t_max);
    scanner.dead_until = scanner.deadband;  // treat t = 0 as freshly fired

    // Progress-stall detector: accepted steps so small that finishing the
    // span is hopeless (>= 1e9 more steps) mean the explicit core is wedged
    // against a stability boundary even though each step formally passes the
    // error test.  A growing state norm is a finite-time blow-up instead --
    // the overflow guard owns that diagnosis, so norm doubling resets the
    // run.
    constexpr double kStallFraction = 1e-9;
    constexpr int kStallRun = 100;
    int stall_run = 0;
    double stall_norm0 = 0.0;

    long n_steps = 0, n_rejected = 0;
    while (st->t() < t_max) {
        if (++n_steps > opts.max_steps) {
            throw ConvergenceError("integrate: exceeded max_steps = " +
                                   std::to_string(opts.max_steps));
        }
        // layer-aware handoff between the cores
        if (policy.enabled && impl) {
            const double yval = std::abs(st->y()[1]);
            if (!use_implicit && yval < 10.0 * policy.eps &&
                st->h_next() < 5.0 * policy.eps) {
                impl->reset(expl.t(), expl.y(), std::max(expl.h_next(), policy.eps));
                use_implicit = true;
                st = &*impl;
            } else if (use_implicit && yval > 12.0 * policy.eps) {
                expl.reset(impl->t(), impl->y(), impl->h_next());
                use_implicit = false;
                st = &expl;
            }
        }
        const double h_cap = std::min(h_max, t_max - st->t());
        if (h_cap < 1e-14 * t_max) break;  // t_max reached up to roundoff
        StepRecord rec;
        if (!st->try_step(h_cap, rec)) {
            ++n_rejected;
            if (st->h_next() < 1e-14 * t_max) {
                if (!use_implicit && !policy.enabled) {
                    throw StiffnessError(
                        "integrate: step size underflow at t = " + std::to_string(st->t()) +
                        "; the system is stiff here, use the implicit integrator");
                }
                throw StiffnessError("integrate: implicit step size underflow at t = " +
                                     std::to_string(st->t()));
            }
            continue;
        }
        if (use_implicit) ++out.n_implicit;

        // guards: finiteness / overflow / chart box
        const double* ynew = st->y();
        double nrm = 0.0;
        for (int i = 0; i < dim; ++i) nrm = std::max(nrm, std::abs(ynew[i]));

        if (!use_implicit && rec.h < kStallFraction * (t_max - st->t())) {
            if (stall_run == 0 || nrm > 2.0 * stall_norm0) {
                stall_run = 0;
                stall_norm0 = std::max(nrm, 1e-300);
            }
            if (++stall_run >= kStallRun) {
                throw StiffnessError("integrate: step size stalled at t = " +
                                     std::to_string(st->t()) +
                                     "; the system is stiff here, use the implicit "
                                     "integrator");
            }
        } else {
            stall_run = 0;
        }
        if (!std::isfinite(nrm) || nrm > opts.overflow_norm) {
            throw EscapeError("integrate: orbit overflow at t = " + std::to_string(st->t()));
        }
        if (opts.escape_box) {
            const auto& b = *opts.escape_box;
            if (ynew[0] < b[0] || ynew[0] > b[1] || ynew[1] < b[2] || ynew[1] > b[3]) {
                throw EscapeError("integrate: orbit left the chart box at t = " +
                                  std::to_string(st->t()));
            }
        }

        // event scan, possibly several non-terminal hits per step
        bool terminated = false;
        while (true) {
            auto hit = scanner.scan(rec);
            if (!hit) break;
            EventHit eh;
            eh.t = hit->t;
            eh.z = hit->z;
            eh.event_id = (*scanner.specs)[static_cast<std::size_t>(hit->spec_index)].id;
            eh.tangential = hit->tangential;
            out.events.push_back(eh);
            scanner.dead_until = std::max(hit->t + scanner.deadband, hit->dead_past);
            if ((*scanner.specs)[static_cast<std::size_t>(hit->spec_index)].terminal) {
                out.steps.push_back(rec);
                out.times.push_back(eh.t);
                out.states.push_back(eh.z);
                out.t_end = eh.t;
                out.event_terminated = true;
                terminated = true;
                break;
            }
        }
        if (terminated) break;

        out.steps.push_back(rec);
        out.times.push_back(st->t());
        Arr zrow{};
        std::memcpy(zrow.data(), ynew, sizeof(double) * static_cast<std::size_t>(dim));
        out.states.push_back(zrow);
        out.t_end = st->t();
    }
    out.n_steps = n_steps - n_rejected;
    out.n_rejected = n_rejected;
    out.n_rhs = expl.n_rhs() + (impl ? impl->n_rhs() : 0);
    return out;
}

// Planar RHS/Jacobian adapters.
RhsFn plane_rhs(const SmoothField2D& field, double alpha, bool backward) {
    const double sign = backward ? -1.0 : 1.0;
    return [field, alpha, sign](double, const double* z, double* dz) {
        const Vec2 f = field.eval(z[0], z[1], alpha);
        dz[0] = sign * f.x;
        dz[1] = sign * f.y;
    };
}

JacFn plane_jac(const SmoothField2D& field, double alpha, bool backward) {
    const double sign = backward ? -1.0 : 1.0;
    return [field, alpha, sign](double, const double* z, double* J) {
        const Mat2 m = field.jacobian(z[0], z[1], alpha);
        J[0] = sign * m.a11;
        J[1] = sign * m.a12;
        J[2] = sign * m.a21;
        J[3] = sign * m.a22;
    };
}

RhsFn plane_var_rhs(const SmoothField2D& field, double alpha, bool backward) {
    const double sign = backward ? -1.0 : 1.0;
    return [field, alpha, sign](double, const double* z, double* dz) {
        const Vec2 f = field.eval(z[0], z[1], alpha);
        const Mat2 J = field.jacobian(z[0], z[1], alpha);
        dz[0] = sign * f.x;
        dz[1] = sign * f.y;
        dz[2] = sign * (J.a11 * z[2] + J.a12 * z[3]);
        dz[3] = sign * (J.a21 * z[2] + J.a22 * z[3]);
    };
}

// Block-diagonal iteration matrix for the tangent-augmented system; the
// tangent-on-state coupling block only affects Newton speed, not the result.
JacFn plane_var_jac(const SmoothField2D& field, double alpha, bool backward) {
    const double sign = backward ? -1.0 : 1.0;
    return [field, alpha, sign](double, const double* z, double* J) {
        const Mat2 m = field.jacobian(z[0], z[1], alpha);
        std::memset(J, 0, sizeof(double) * 16);
        J[0 * 4 + 0] = sign * m.a11;
        J[0 * 4 + 1] = sign * m.a12;
        J[1 * 4 + 0] = sign * m.a21;
        J[1 * 4 + 1] = sign * m.a22;
        J[2 * 4 + 2] = sign * m.a11;
        J[2 * 4 + 3] = sign * m.a12;
        J[3 * 4 + 2] = sign * m.a21;
        J[3 * 4 + 3] = sign * m.a22;
    };
}

}  // namespace

// ---------------------------------------------------------------------------
// OrbitSegment dense access
// ---------------------------------------------------------------------------

void OrbitSegment::state_at(double t, double* outv) const {
    if (steps.empty()) {
        for (int i = 0; i < dim; ++i) outv[i] = states.front()[i];
        return;
    }
    // binary search for the step containing t
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (steps[mid].t0 + steps[mid].h < t) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    const StepRecord& rec = steps[lo];
    const double th = std::clamp((t - rec.t0) / rec.h, 0.0, 1.0);
    for (int i = 0; i < dim; ++i) outv[i] = dense_eval_impl(rec.c[i], th);
}

Vec2 OrbitSegment::plane_at(double t) const {
    Arr z{};
    state_at(t, z.data());
    return {z[0], z[1]};
}

Vec2 OrbitSegment::tangent_at(double t) const {
    if (dim < 4) throw DomainError("tangent_at: orbit has no tangent components");
    Arr z{};
    state_at(t, z.data());
    return {z[2], z[3]};
}

Vec2 OrbitSegment::end_plane() const {
    return {states.back()[0], states.back()[1]};
}

Vec2 OrbitSegment::end_tangent() const {
    if (dim < 4) throw DomainError("end_tangent: orbit has no tangent components");
    return {states.back()[2], states.back()[3]};
}

double dense_eval(const std::array<double, 5>& c, double theta) {
    return dense_eval_impl(c, theta);
}

std::vector<double> dense_extrema_01(const std::array<double, 5>& c) {
    // roots of c1 + 2 c2 th + 3 c3 th^2 + 4 c4 th^3 in (0,1): bracket on a
    // fine grid, then bisect -- robust for the cubic and cheap.
    const auto der = [&c](double th) {
        return c[1] + th * (2.0 * c[2] + th * (3.0 * c[3] + th * 4.0 * c[4]));
    };
    std::vector<double> roots;
    constexpr int K = 16;
    double prev = der(0.0);
    for (int j = 1; j <= K; ++j) {
        const double th = static_cast<double>(j) / K;
        const double cur = der(th);
        if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
            double a = static_cast<double>(j - 1) / K, b = th, fa = prev;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = der(m);
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    return roots;
}

EventSpec section_event(int component, double level, int direction, bool terminal, int id) {
    EventSpec ev;
    ev.g = [component, level](const double* z) { return z[component] - level; };
    ev.direction = direction;
    ev.terminal = terminal;
    ev.id = id;
    return ev;
}

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

OrbitSegment integrate_ode(const RhsFn& rhs, int dim, const double* z0, double t_max,
                           const std::vector<EventSpec>& events, const OdeOptions& opts) {
    return run_integration(rhs, nullptr, dim, z0, t_max, events, opts, false, {}, false,
                           false);
}

OrbitSegment integrate_ode_implicit(const RhsFn& rhs, const JacFn& jac, int dim,
                                    const double* z0, double t_max,
                                    const std::vector<EventSpec>& events,
                                    const OdeOptions& opts) {
    return run_integration(rhs, &jac, dim, z0, t_max, events, opts, true, {}, false, false);
}

OrbitSegment integrate(const SmoothField2D& field, Vec2 z0, double alpha, double t_max,
                       double tol, const std::vector<EventSpec>& events, bool backward,
                       const OdeOptions& opts) {
    OdeOptions o = opts;
    o.tol = tol;
    const double z[2] = {z0.x, z0.y};
    return run_integration(plane_rhs(field, alpha, backward), nullptr, 2, z, t_max, events,
                           o, false, {}, backward, false);
}

OrbitSegment integrate_variational(const SmoothField2D& field, Vec2 z0, Vec2 v0,
                                   double alpha, double t_max, double tol,
                                   const std::vector<EventSpec>& events, bool backward,
                                   const OdeOptions& opts) {
    OdeOptions o = opts;
    o.tol = tol;
    const double z[4] = {z0.x, z0.y, v0.x, v0.y};
    return run_integration(plane_var_rhs(field, alpha, backward), nullptr, 4, z, t_max,
                           events, o, false, {}, backward, true);
}

OrbitSegment integrate_implicit(const SmoothField2D& field, Vec2 z0, double alpha,
                                double t_max, double tol,
                                const std::vector<EventSpec>& events, bool backward,
                                const OdeOptions& opts) {
    OdeOptions o = opts;
    o.tol = tol;
    const double z[2] = {z0.x, z0.y};
    const JacFn jac = plane_jac(field, alpha, backward);
    return run_integration(plane_rhs(field, alpha, backward), &jac, 2, z, t_max, events, o,
                           true, {}, backward, false);
}

OrbitSegment integrate_auto(const SmoothField2D& field, Vec2 z0,
                            const std::optional<Vec2>& v0, double alpha, double t_max,
                            double tol, double eps, const std::vector<EventSpec>& events,
                            bool backward, const OdeOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("integrate_auto: eps must be > 0");
    OdeOptions o = opts;
    o.tol = tol;
    AutoPolicy policy;
    policy.enabled = true;
    policy.eps = eps;
    if (v0) {
        const double z[4] = {z0.x, z0.y, v0->x, v0->y};
        const JacFn jac = plane_var_jac(field, alpha, backward);
        return run_integration(plane_var_rhs(field, alpha, backward), &jac, 4, z, t_max,
                               events, o, false, policy, backward, true);
    }
    const double z[2] = {z0.x, z0.y};
    const JacFn jac = plane_jac(field, alpha, backward);
    return run_integration(plane_rhs(field, alpha, backward), &jac, 2, z, t_max, events, o,
                           false, policy, backward, false);
}

}  // namespace foldlab

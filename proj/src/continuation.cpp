#include "foldlab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "foldlab/sweep.hpp"

namespace foldlab {

namespace {

constexpr double kNewtonTol = 1e-10;  // |P(x) - x| at convergence
constexpr int kNewtonMaxIter = 50;
constexpr int kMaxHalvings = 6;
constexpr double kMapTol = 1e-12;       // integration tol inside Newton layers
constexpr double kFoldTolMap = 1e-9;    // |P - x| at the fold solution
constexpr double kFoldTolMult = 1e-8;   // |P'_x - 1| at the fold solution
constexpr double kNondegFloor = 1e-6;   // |P''_xx|, |P'_alpha| floors

ReturnSample eval_p(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                    const SectionPair& sec, double x, double alpha) {
    return p_map(model, fn, eps, sec, x, alpha, false, 200.0, kMapTol);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Damped scalar Newton on P(x) - x at fixed alpha.  Returns the converged x
// and leaves the final sample in `last`.
double newton_fixed_x(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                      const SectionPair& sec, double x0, double alpha,
                      ReturnSample& last) {
    double x = x0;
    ReturnSample s = eval_p(model, fn, eps, sec, x, alpha);
    double f = s.x_out - x;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        if (std::abs(f) <= kNewtonTol) {
            last = s;
            return x;
        }
        const double fp = s.d1 - 1.0;
        if (std::abs(fp) < 1e-13) {
            throw SingularityError("cycle Newton: P'_x = 1, step undefined (near a fold)");
        }
        double dx = -f / fp;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            const double xt = x + dx;
            ReturnSample st = eval_p(model, fn, eps, sec, xt, alpha);
            const double ft = st.x_out - xt;
            if (std::abs(ft) < std::abs(f) || std::abs(ft) <= kNewtonTol) {
                x = xt;
                s = st;
                f = ft;
                accepted = true;
                break;
            }
            dx *= 0.5;
        }
        if (!accepted) {
            throw ConvergenceError("cycle Newton stalled after damping; residual " +
                                   fmt(std::abs(f)));
        }
    }
    throw ConvergenceError("cycle Newton: no convergence in 50 iterations; residual " +
                           fmt(std::abs(f)));
}

// Fill multiplier / y_min / flight_time from one tangent-carrying return.
BranchPoint finish_point(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                         const SectionPair& sec, double x, double alpha) {
    const OrbitSegment orb =
        p_map_segment(model, fn, eps, sec, x, alpha, true, 200.0, kMapTol);
    if (!orb.event_terminated) {
        throw NotFoundError("cycle diagnostics: no return to the section");
    }
    const SmoothField2D field =
        (eps == 0.0) ? model.z_plus : assemble_regularized(model, fn, eps);
    const EventHit& hit = orb.events.back();
    const Vec2 F = field.eval(hit.z[0], hit.z[1], alpha);
    if (std::abs(F.y) < 1e-12 * (1.0 + std::abs(F.x))) {
        throw SingularityError("cycle diagnostics: tangential section arrival");
    }
    BranchPoint bp;
    bp.alpha = alpha;
    bp.x_fix = x;
    bp.multiplier = hit.z[2] - (F.x / F.y) * hit.z[3];
    bp.y_min = min_y_of_orbit(orb).first;
    bp.flight_time = hit.t;
    return bp;
}

}  // namespace

BranchPoint cycle_newton(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                         const SectionPair& sections, double x0, double alpha) {
    sections.validate();
    ReturnSample last;
    const double x = newton_fixed_x(model, fn, eps, sections, x0, alpha, last);
    return finish_point(model, fn, eps, sections, x, alpha);
}

BranchPoint stable_cycle_from_simulation(const PwsModel& model, const RegFnDescriptor& fn,
                                         double eps, const SectionPair& sections,
                                         double alpha, Vec2 z0, double t_settle) {
    sections.validate();
    const SmoothField2D field =
        (eps == 0.0) ? model.z_plus : assemble_regularized(model, fn, eps);
    std::vector<EventSpec> evs{section_event(1, sections.delta, -1, false, 1)};
    const OrbitSegment orb =
        (eps == 0.0)
            ? integrate(field, z0, alpha, t_settle, 1e-10, evs)
            : integrate_auto(field, z0, std::nullopt, alpha, t_settle, 1e-10, eps, evs);
    if (orb.events.empty()) {
        throw NotFoundError("settle: no downward section crossings; no cycle reached");
    }
    return cycle_newton(model, fn, eps, sections, orb.events.back().z[0], alpha);
}

BranchResult trace_branch(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                          const SectionPair& sections, double alpha_start,
                          double alpha_end, const BranchPoint& seed,
                          const TraceOptions& opts) {
    sections.validate();
    BranchResult res;
    res.points.push_back(seed);

    const double a_lo = std::min(alpha_start, alpha_end) - opts.alpha_margin;
    const double a_hi = std::max(alpha_start, alpha_end) + opts.alpha_margin;
    const double dir = (alpha_end >= alpha_start) ? 1.0 : -1.0;

    // First step by natural continuation to establish a secant direction.
    {
        const double da0 = std::max(opts.ds_min, std::min(opts.ds0, 1e-3));
        bool ok = false;
        for (double da = da0; da >= opts.ds_min / 2.0 && !ok; da *= 0.5) {
            try {
                const double a1 = seed.alpha + dir * da;
                ReturnSample last;
                const double x1 =
                    newton_fixed_x(model, fn, eps, sections, seed.x_fix, a1, last);
                res.points.push_back(finish_point(model, fn, eps, sections, x1, a1));
                ok = true;
            } catch (const std::exception&) {
            }
        }
        if (!ok) {
            res.truncated = true;
            res.truncation_reason = "first natural step failed";
            return res;
        }
    }

    double ds = opts.ds0;
    int halvings_left = 3;
    while (static_cast<int>(res.points.size()) < opts.max_points) {
        const BranchPoint& p1 = res.points[res.points.size() - 1];
        const BranchPoint& p0 = res.points[res.points.size() - 2];
        double tx = p1.x_fix - p0.x_fix;
        double ta = p1.alpha - p0.alpha;
        const double tn = std::hypot(tx, ta);
        if (tn < 1e-15) {
            res.truncated = true;
            res.truncation_reason = "degenerate secant tangent";
            break;
        }
        tx /= tn;
        ta /= tn;

        // Predictor and orthogonal-plane Newton corrector.
        double x = p1.x_fix + ds * tx;
        double a = p1.alpha + ds * ta;
        bool corrected = false;
        try {
            for (int it = 0; it < 8; ++it) {
                const ReturnSample s = eval_p(model, fn, eps, sections, x, a);
                const double f1 = s.x_out - x;
                const double f2 = (x - (p1.x_fix + ds * tx)) * tx +
                                  (a - (p1.alpha + ds * ta)) * ta;
                if (std::abs(f1) <= kNewtonTol && std::abs(f2) <= 1e-12) {
                    corrected = true;
                    break;
                }
                const double da_fd = 1e-7 * std::max(1.0, std::abs(a));
                const ReturnSample sp = eval_p(model, fn, eps, sections, x, a + da_fd);
                const ReturnSample sm = eval_p(model, fn, eps, sections, x, a - da_fd);
                const double pa = (sp.x_out - sm.x_out) / (2.0 * da_fd);
                const Mat2 J{s.d1 - 1.0, pa, tx, ta};
                const Vec2 du = solve2x2(J, {-f1, -f2});
                x += du.x;
                a += du.y;
            }
        } catch (const std::exception&) {
            corrected = false;
        }

        if (!corrected) {
            if (halvings_left == 0 || ds <= opts.ds_min) {
                res.truncated = true;
                res.truncation_reason = "corrector divergence at ds = " + fmt(ds);
                break;
            }
            ds = std::max(opts.ds_min, ds * 0.5);
            --halvings_left;
            continue;
        }
        halvings_left = 3;
        ds = std::min(opts.ds_max, ds * 1.3);

        res.points.push_back(finish_point(model, fn, eps, sections, x, a));

        // Fold flags: d(alpha) sign change, or multiplier crossing 1.
        const std::size_t n = res.points.size();
        if (n >= 3) {
            const double d1 = res.points[n - 1].alpha - res.points[n - 2].alpha;
            const double d0 = res.points[n - 2].alpha - res.points[n - 3].alpha;
            const bool alpha_turn = (d0 > 0.0) != (d1 > 0.0);
            const bool mult_cross = (res.points[n - 1].multiplier - 1.0) *
                                        (res.points[n - 2].multiplier - 1.0) <
                                    0.0;
            if ((alpha_turn || mult_cross) &&
                (res.fold_indices.empty() || res.fold_indices.back() + 1 < n - 2)) {
                res.fold_indices.push_back(n - 2);
            }
        }

        if (opts.stop_after_fold && !res.fold_indices.empty() &&
            res.points.size() >= res.fold_indices.front() + 3) {
            break;
        }
        if (a < a_lo || a > a_hi) break;
    }
    return res;
}

FoldPoint solve_fold(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                     const SectionPair& sections, const BranchPoint& guess) {
    sections.validate();
    double x = guess.x_fix;
    double a = guess.alpha;
    double pxx = 0.0, pa = 0.0;
    const auto residual = [&](double xs, double as, ReturnSample& s) {
        s = eval_p(model, fn, eps, sections, xs, as);
        return std::max(std::abs(s.x_out - xs), std::abs(s.d1 - 1.0));
    };
    ReturnSample s;
    double res = residual(x, a, s);
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        if (std::abs(s.x_out - x) <= kFoldTolMap && std::abs(s.d1 - 1.0) <= kFoldTolMult) {
            converged = true;
            break;
        }
        const double hx = 1e-6 * std::max(1.0, std::abs(x));
        const double ha = 1e-6 * std::max(1.0, std::abs(a));
        const ReturnSample sxp = eval_p(model, fn, eps, sections, x + hx, a);
        const ReturnSample sxm = eval_p(model, fn, eps, sections, x - hx, a);
        const ReturnSample sap = eval_p(model, fn, eps, sections, x, a + ha);
        const ReturnSample sam = eval_p(model, fn, eps, sections, x, a - ha);
        pxx = (sxp.d1 - sxm.d1) / (2.0 * hx);
        const double pxa = (sap.d1 - sam.d1) / (2.0 * ha);
        pa = (sap.x_out - sam.x_out) / (2.0 * ha);
        Vec2 du;
        try {
            const Mat2 J{s.d1 - 1.0, pa, pxx, pxa};
            du = solve2x2(J, {-(s.x_out - x), -(s.d1 - 1.0)});
        } catch (const SingularityError&) {
            throw SingularityError("degenerate fold: singular augmented Jacobian");
        }
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            ReturnSample st;
            try {
                const double rt = residual(x + du.x, a + du.y, st);
                if (rt < res || rt <= kFoldTolMult) {
                    x += du.x;
                    a += du.y;
                    s = st;
                    res = rt;
                    accepted = true;
                    break;
                }
            } catch (const std::exception&) {
                // step left the map's domain; damp
            }
            du = du * 0.5;
        }
        if (!accepted) {
            throw ConvergenceError("fold Newton stalled; residual " + fmt(res));
        }
    }
    if (!converged) {
        throw ConvergenceError("fold Newton: no convergence in 50 iterations; residual " +
                               fmt(res));
    }
    if (std::abs(pxx) < kNondegFloor || std::abs(pa) < kNondegFloor) {
        throw SingularityError("degenerate fold: |P''_xx| or |P'_alpha| below 1e-6");
    }
    FoldPoint fp;
    fp.eps = eps;
    fp.alpha_sn = a;
    fp.x_sn = x;
    fp.d2xx = pxx;
    fp.dp_dalpha = pa;
    fp.orbit = p_map_orbit(model, fn, eps, sections, x, a, 200.0, kMapTol);
    return fp;
}

GrazingResult grazing_alpha(const PwsModel& model, const SectionPair& sections,
                            double alpha0, double alpha1, Vec2 interior_start) {
    sections.validate();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);  // unused at eps = 0

    // Backward-time settling onto the repelling cycle at alpha0, seeding the
    // shooting Newton from the last crossing that is a forward down-crossing.
    std::vector<EventSpec> evs{section_event(1, sections.delta, 0, false, 1)};
    OdeOptions opts;
    opts.overflow_norm = 1e6;
    const OrbitSegment back = integrate(model.z_plus, interior_start, alpha0, 400.0,
                                        1e-10, evs, true, opts);
    double x_seed = 0.0;
    bool found = false;
    for (auto it = back.events.rbegin(); it != back.events.rend(); ++it) {
        const Vec2 F = model.z_plus.eval(it->z[0], it->z[1], alpha0);
        if (F.y < 0.0) {
            x_seed = it->z[0];
            found = true;
            break;
        }
    }
    if (!found) {
        throw NotFoundError("grazing: backward settling found no downward crossing");
    }

    // Natural walk along the branch: small alpha steps keep the one-loop
    // Newton seeds close enough that the near-fold passage stays bounded.
    BranchPoint lo = cycle_newton(model, fn, 0.0, sections, x_seed, alpha0);
    if (!(lo.y_min > 0.0)) {
        throw DomainError("grazing: alpha0 already has y_min <= 0 (start below "
                          "the grazing value)");
    }
    const double dir = (alpha1 >= alpha0) ? 1.0 : -1.0;
    const double a_stop = alpha1 + dir * 0.05;
    double da = std::min(0.005, std::max(1e-4, std::abs(alpha1 - alpha0) / 4.0));
    BranchPoint hi = lo;
    bool bracketed = false;
    int fails = 0;
    while (!bracketed) {
        if (dir * (hi.alpha - a_stop) >= 0.0) {
            throw NotFoundError("grazing: y_min kept its sign up to alpha " +
                                fmt(hi.alpha));
        }
        const double a_try = hi.alpha + dir * da;
        try {
            const BranchPoint nxt =
                cycle_newton(model, fn, 0.0, sections, hi.x_fix, a_try);
            lo = hi;
            hi = nxt;
            if (hi.y_min <= 0.0) bracketed = true;
            da = std::min(0.005, da * 1.5);
            fails = 0;
        } catch (const std::exception&) {
            da *= 0.5;
            if (++fails > 12) {
                throw ConvergenceError("grazing walk stalled near alpha " +
                                       fmt(hi.alpha));
            }
        }
    }

    // Bracketed secant on y_min(alpha); lo.y_min > 0 >= hi.y_min throughout.
    double slope = (hi.y_min - lo.y_min) / (hi.alpha - lo.alpha);
    BranchPoint best = std::abs(lo.y_min) < std::abs(hi.y_min) ? lo : hi;
    for (int it = 0; it < 60 && std::abs(best.y_min) > 1e-8; ++it) {
        slope = (hi.y_min - lo.y_min) / (hi.alpha - lo.alpha);
        double a2 = best.alpha - best.y_min / slope;
        const double width = hi.alpha - lo.alpha;
        a2 = std::clamp(a2, std::min(lo.alpha, hi.alpha) + 1e-3 * std::abs(width),
                        std::max(lo.alpha, hi.alpha) - 1e-3 * std::abs(width));
        const BranchPoint seed = std::abs(a2 - lo.alpha) < std::abs(a2 - hi.alpha)
                                     ? lo
                                     : hi;
        const BranchPoint mid = cycle_newton(model, fn, 0.0, sections, seed.x_fix, a2);
        if (mid.y_min > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        best = std::abs(lo.y_min) < std::abs(hi.y_min) ? lo : hi;
        if (std::abs(hi.alpha - lo.alpha) < 1e-13) break;
    }
    if (std::abs(best.y_min) > 1e-8) {
        throw ConvergenceError("grazing secant: no convergence; y_min " +
                               fmt(best.y_min));
    }
    GrazingResult out;
    out.alpha_star = best.alpha;
    out.dymin_dalpha = slope;
    out.y_min_residual = best.y_min;
    out.gamma0 =
        p_map_orbit(model, fn, 0.0, sections, best.x_fix, best.alpha, 200.0, kMapTol);
    return out;
}

HopfResult equilibrium_hopf(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                            double alpha_lo, double alpha_hi, Vec2 eq_guess) {
    if (!(alpha_lo < alpha_hi)) throw DomainError("hopf: need alpha_lo < alpha_hi");
    const SmoothField2D field =
        (eps == 0.0) ? model.z_plus : assemble_regularized(model, fn, eps);

    Vec2 guess = eq_guess;
    const auto equilibrium = [&](double alpha) {
        Vec2 z = guess;
        for (int it = 0; it < 60; ++it) {
            const Vec2 F = field.eval(z.x, z.y, alpha);
            if (std::abs(F.x) + std::abs(F.y) <= 1e-13 * (1.0 + z.norm())) {
                guess = z;  // warm start for the next alpha
                return z;
            }
            const Mat2 J = field.jacobian(z.x, z.y, alpha);
            const Vec2 dz = solve2x2(J, {-F.x, -F.y});
            z += dz;
        }
        throw ConvergenceError("hopf: equilibrium Newton failed at alpha " + fmt(alpha));
    };
    const auto trace_at = [&](double alpha) {
        const Vec2 z = equilibrium(alpha);
        return field.jacobian(z.x, z.y, alpha).trace();
    };

    double lo = alpha_lo, hi = alpha_hi;
    double t_lo = trace_at(lo);
    const double t_hi = trace_at(hi);
    if (t_lo == 0.0) hi = lo;
    else if (t_hi == 0.0) lo = hi;
    else if ((t_lo > 0.0) == (t_hi > 0.0)) {
        throw NotFoundError("hopf: trace(J) does not change sign over the alpha window");
    }
    for (int it = 0; it < 100 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double t_mid = trace_at(mid);
        if (t_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((t_mid > 0.0) == (t_lo > 0.0)) {
            lo = mid;
            t_lo = t_mid;
        } else {
            hi = mid;
        }
    }
    HopfResult out;
    out.alpha_h = 0.5 * (lo + hi);
    out.equilibrium = equilibrium(out.alpha_h);
    out.det_j = field.jacobian(out.equilibrium.x, out.equilibrium.y, out.alpha_h).det();
    return out;
}

namespace {

// Solve P(x, alpha) = x for alpha at fixed x: near a saddle-node the cycle
// branch is a graph alpha(x) with dP/dalpha bounded away from zero, so a
// damped secant-slope Newton in alpha is safe on both sides of the fold.
// Returns the converged sample, whose d1 is the multiplier m(x) on the graph.
ReturnSample alpha_on_branch(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                             const SectionPair& sec, double x, double& alpha) {
    ReturnSample s = eval_p(model, fn, eps, sec, x, alpha);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        double f = s.x_out - x;
        if (std::abs(f) <= kNewtonTol * std::max(1.0, std::abs(x))) return s;
        const double ha = 1e-6 * std::max(1.0, std::abs(alpha));
        const double fp = eval_p(model, fn, eps, sec, x, alpha + ha).x_out - x;
        const double fm = eval_p(model, fn, eps, sec, x, alpha - ha).x_out - x;
        const double dfda = (fp - fm) / (2.0 * ha);
        if (!(std::abs(dfda) > 1e-12)) {
            throw SingularityError("fold bracket: dP/dalpha vanished at x = " + fmt(x));
        }
        double da = -f / dfda;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            try {
                ReturnSample st = eval_p(model, fn, eps, sec, x, alpha + da);
                const double ft = st.x_out - x;
                if (std::abs(ft) < std::abs(f) || std::abs(ft) <= kNewtonTol) {
                    alpha += da;
                    s = st;
                    accepted = true;
                    break;
                }
            } catch (const std::exception&) {
                // alpha stepped outside the map's domain; damp
            }
            da *= 0.5;
        }
        if (!accepted) {
            throw ConvergenceError("fold bracket: alpha Newton stalled at x = " + fmt(x));
        }
    }
    throw ConvergenceError("fold bracket: alpha Newton did not converge at x = " +
                           fmt(x));
}

// Localize the multiplier crossing m(x) = 1 between two branch points on
// opposite sides of a fold.  On the stable side the multiplier is
// exponentially flat in the layer (m ~ 0), so plain secant steps are clamped
// toward bisection; on the unstable side m varies polynomially and the
// iteration homes in fast.  Stops once the seed is good enough for the
// augmented Newton polish.
BranchPoint refine_fold_bracket(const PwsModel& model, const RegFnDescriptor& fn,
                                double eps, const SectionPair& sec,
                                const BranchPoint& lo, const BranchPoint& hi) {
    double xa = lo.x_fix, aa = lo.alpha, ga = lo.multiplier - 1.0;
    double xb = hi.x_fix, ab = hi.alpha, gb = hi.multiplier - 1.0;
    BranchPoint best = std::abs(ga) < std::abs(gb) ? lo : hi;
    for (int it = 0; it < 60 && std::abs(xb - xa) > 1e-12 * std::max(1.0, std::abs(xa));
         ++it) {
        const double t = std::clamp(ga / (ga - gb), 0.15, 0.85);
        const double xm = xa + t * (xb - xa);
        double am = aa + t * (ab - aa);  // linear predictor along the graph
        const ReturnSample s = alpha_on_branch(model, fn, eps, sec, xm, am);
        const double gm = s.d1 - 1.0;
        if (std::abs(gm) < std::abs(best.multiplier - 1.0)) {
            best.alpha = am;
            best.x_fix = xm;
            best.multiplier = s.d1;
        }
        if (std::abs(gm) <= 1e-3) break;
        if ((gm < 0.0) == (ga < 0.0)) {
            xa = xm;
            aa = am;
            ga = gm;
        } else {
            xb = xm;
            ab = am;
            gb = gm;
        }
    }
    return best;
}

}  // namespace

FoldPoint find_fold_for_eps(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                            const SectionPair& sections, const SweepSettings& settings,
                            double alpha_star) {
    const BranchPoint seed = stable_cycle_from_simulation(
        model, fn, eps, sections, settings.alpha_stable_probe, settings.sim_start,
        settings.t_settle);
    TraceOptions topts = settings.trace;
    topts.stop_after_fold = true;
    const BranchResult br = trace_branch(model, fn, eps, sections, seed.alpha,
                                         alpha_star + 0.05, seed, topts);
    if (br.fold_indices.empty()) {
        std::string why = "no fold flagged along the branch";
        if (br.truncated) why += " (" + br.truncation_reason + ")";
        why += "; last alpha " + fmt(br.points.back().alpha);
        throw NotFoundError(why);
    }
    const std::size_t fi = br.fold_indices.front();
    BranchPoint guess = br.points[fi];
    // Small eps makes the stable side exponentially flat (multiplier ~ 0
    // through the layer), where the augmented Newton's linear model cannot
    // see the fold.  Whenever the flagged point is far from m = 1, reseed
    // from the multiplier crossing between adjacent branch points.
    if (std::abs(guess.multiplier - 1.0) > 0.5) {
        for (std::size_t i = fi >= 2 ? fi - 2 : 0; i + 1 < br.points.size(); ++i) {
            const double g0 = br.points[i].multiplier - 1.0;
            const double g1 = br.points[i + 1].multiplier - 1.0;
            if ((g0 < 0.0) != (g1 < 0.0)) {
                guess = refine_fold_bracket(model, fn, eps, sections, br.points[i],
                                            br.points[i + 1]);
                break;
            }
        }
    }
    FoldPoint fp = solve_fold(model, fn, eps, sections, guess);
    fp.eps = eps;
    return fp;
}

ScalingFit scaling_sweep(const PwsModel& model, const RegFnDescriptor& fn,
                         const std::vector<double>& eps_list, const SectionPair& sections,
                         const SweepSettings& settings) {
    if (eps_list.empty()) throw ConfigError("scaling sweep: empty eps list");
    const GrazingResult gz =
        grazing_alpha(model, sections, settings.alpha_graze_seed0,
                      settings.alpha_graze_seed1, settings.sim_start);
    ScalingFit fit;
    fit.alpha_star = gz.alpha_star;
    fit.points.resize(eps_list.size());
    run_parallel(
        eps_list.size(),
        [&](std::size_t i) {
            ScalingPoint& pt = fit.points[i];
            pt.eps = eps_list[i];
            try {
                const FoldPoint fp =
                    find_fold_for_eps(model, fn, eps_list[i], sections, settings,
                                      gz.alpha_star);
                pt.alpha_sn = fp.alpha_sn;
                pt.x_sn = fp.x_sn;
                pt.gap = gz.alpha_star - fp.alpha_sn;
                if (!(pt.gap > 0.0)) {
                    pt.error = "non-positive gap " + fmt(pt.gap);
                    return;
                }
                pt.hausdorff_to_grazing = hausdorff_distance(fp.orbit, gz.gamma0);
                pt.ok = true;
            } catch (const std::exception& e) {
                pt.error = e.what();
            }
        },
        settings.jobs);

    std::vector<double> lx, ly;
    for (const ScalingPoint& pt : fit.points) {
        if (pt.ok) {
            lx.push_back(std::log(pt.eps));
            ly.push_back(std::log(pt.gap));
        }
    }
    fit.n_ok = static_cast<int>(lx.size());
    if (fit.n_ok >= 2) {
        const LineFit lf = fit_line(lx, ly);
        fit.slope = lf.slope;
        fit.intercept = lf.intercept;
        fit.r_squared = lf.r_squared;
    }
    return fit;
}

std::vector<double> count_fixed_points_scan(const PwsModel& model,
                                            const RegFnDescriptor& fn, double eps,
                                            const SectionPair& sections, double alpha,
                                            double x_lo, double x_hi, int n, int jobs) {
    if (n < 2 || !(x_lo < x_hi)) throw DomainError("fixed-point scan: bad grid");
    std::vector<double> f(n + 1);
    std::vector<char> ok(n + 1, 0);
    run_parallel(
        static_cast<std::size_t>(n) + 1,
        [&](std::size_t i) {
            const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / n;
            try {
                f[i] = eval_p(model, fn, eps, sections, x, alpha).x_out - x;
                ok[i] = 1;
            } catch (const std::exception&) {
            }
        },
        jobs);
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        if (!ok[i] || !ok[i + 1]) continue;
        if (f[i] == 0.0 || f[i] * f[i + 1] < 0.0) {
            const double x0 = x_lo + (x_hi - x_lo) * static_cast<double>(i) / n;
            const double x1 = x_lo + (x_hi - x_lo) * static_cast<double>(i + 1) / n;
            roots.push_back(f[i] == 0.0 ? x0 : x0 - f[i] * (x1 - x0) / (f[i + 1] - f[i]));
        }
    }
    return roots;
}

}  // namespace foldlab

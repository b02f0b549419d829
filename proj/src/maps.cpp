#include "foldlab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace foldlab {

namespace {

constexpr int kEvSection = 1;

// Tangent projected onto a horizontal section along the flow at arrival:
// the section-map derivative d x_out = V1 - (F1/F2) V2.
double project_tangent(const Vec2& V, const Vec2& F) {
    if (std::abs(F.y) < 1e-12 * (1.0 + std::abs(F.x))) {
        throw SingularityError("section arrival is tangential; map derivative undefined");
    }
    return V.x - (F.x / F.y) * V.y;
}

// q_map core for eps > 0: regularized field, upward return to y = delta.
ReturnSample q_reg(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                   const SectionPair& sec, double x, double alpha) {
    const SmoothField2D field = assemble_regularized(model, fn, eps);
    OdeOptions opts;
    opts.escape_box = std::array<double, 4>{-sec.xi, sec.xi, -sec.xi, sec.xi};
    std::vector<EventSpec> evs{section_event(1, sec.delta, +1, true, kEvSection)};
    const OrbitSegment orb = integrate_auto(field, {x, sec.delta}, Vec2{1.0, 0.0}, alpha,
                                            50.0, 1e-10, eps, evs, false, opts);
    if (!orb.event_terminated) {
        throw EscapeError("q_map: no upward return to the outgoing section");
    }
    const EventHit& hit = orb.events.back();
    const Vec2 z{hit.z[0], hit.z[1]};
    const Vec2 V{hit.z[2], hit.z[3]};
    const Vec2 F = field.eval(z.x, z.y, alpha);
    ReturnSample out;
    out.x_out = z.x;
    out.d1 = project_tangent(V, F);
    out.flight_time = hit.t;
    return out;
}

// eps = 0 PWS composite in the normal-form layout (fold at x = 0, sliding in
// x < 0, lift-off along Z+).
ReturnSample q_pws(const PwsModel& model, const SectionPair& sec, double x, double alpha) {
    OdeOptions opts;
    opts.escape_box = std::array<double, 4>{-sec.xi, sec.xi, -sec.xi, sec.xi};
    ReturnSample out;

    // Z+ flight from (x, delta): either it grazes above Sigma and returns to
    // y = delta directly, or it lands on y = 0 first.
    std::vector<EventSpec> evs{section_event(1, sec.delta, +1, true, kEvSection),
                               section_event(1, 0.0, -1, true, 2)};
    const OrbitSegment leg1 = integrate_variational(model.z_plus, {x, sec.delta},
                                                    {1.0, 0.0}, alpha, 50.0, 1e-10, evs,
                                                    false, opts);
    if (!leg1.event_terminated) throw EscapeError("q_map(0): no section or Sigma hit");
    const EventHit& h1 = leg1.events.back();
    if (h1.event_id == kEvSection) {
        // pure Z+ reflection (x above the tangent orbit at gamma_L)
        const Vec2 z{h1.z[0], h1.z[1]};
        const Vec2 V{h1.z[2], h1.z[3]};
        const Vec2 F = model.z_plus.eval(z.x, z.y, alpha);
        out.x_out = z.x;
        out.d1 = project_tangent(V, F);
        out.flight_time = h1.t;
        return out;
    }

    // Landed on Sigma: slide with the Filippov drift until the visible fold,
    // where Z+ becomes tangent (Z+_2(x, 0) = 0).  A tangential graze lands at
    // the fold itself and skips the slide.
    const double x_land = h1.z[0];
    const double lie_land = model.z_plus.eval(x_land, 0.0, alpha).y;
    if (lie_land > 1e-8) {
        throw EscapeError("q_map(0): landed in the crossing region past the fold");
    }
    double t_slide = 0.0;
    double x_fold = x_land;
    if (lie_land < -1e-12) {
        const PwsModel* mp = &model;
        const RhsFn slide = [mp, alpha](double, const double* z, double* dz) {
            dz[0] = filippov_drift(*mp, z[0], alpha);
        };
        EventSpec fold_ev;
        fold_ev.g = [mp, alpha](const double* z) {
            return mp->z_plus.eval(z[0], 0.0, alpha).y;
        };
        fold_ev.direction = +1;
        fold_ev.terminal = true;
        fold_ev.id = 3;
        OdeOptions sopt;
        const OrbitSegment leg2 = integrate_ode(slide, 1, &x_land, 100.0, {fold_ev}, sopt);
        if (!leg2.event_terminated) {
            throw EscapeError("q_map(0): slide never reached the fold");
        }
        t_slide = leg2.events.back().t;
        x_fold = leg2.events.back().z[0];
    }

    // Lift off along Z+ from the fold.
    std::vector<EventSpec> up_ev{section_event(1, sec.delta, +1, true, kEvSection)};
    const OrbitSegment leg3 = integrate(model.z_plus, {x_fold, 0.0}, alpha, 50.0, 1e-10,
                                        up_ev, false, opts);
    if (!leg3.event_terminated) throw EscapeError("q_map(0): lift-off missed the section");
    out.x_out = leg3.events.back().z[0];
    out.d1 = 0.0;  // the slide phase collapses all initial conditions
    out.d2 = 0.0;
    out.slid = true;
    out.flight_time = h1.t + t_slide + leg3.events.back().t;
    return out;
}

}  // namespace

SectionPair SectionPair::normal_form(double delta, double xi) {
    SectionPair s;
    s.delta = delta;
    s.xi = xi;
    s.gamma_l = -std::sqrt(delta);
    s.gamma_r = std::sqrt(delta);
    s.il_lo = 2.25 * s.gamma_l;
    s.il_hi = -0.05 * std::sqrt(delta);
    s.ir_lo = 0.05 * std::sqrt(delta);
    s.ir_hi = 2.25 * s.gamma_r;
    s.local_geometry = true;
    s.validate();
    return s;
}

SectionPair SectionPair::friction(double delta) {
    SectionPair s;
    s.delta = delta;
    s.xi = 50.0;  // wide overflow guard; the friction return is global
    s.local_geometry = false;
    s.validate();
    return s;
}

void SectionPair::validate() const {
    if (!(delta > 0.0)) throw ConfigError("sections: delta must be > 0");
    if (!(xi > delta)) throw ConfigError("sections: need chart size xi > delta");
    if (!local_geometry) return;
    if (!(il_lo < gamma_l && gamma_l < il_hi && il_hi < 0.0)) {
        throw ConfigError("sections: I_L must lie in x < 0 with gamma_L interior");
    }
    if (!(0.0 < ir_lo && ir_lo < gamma_r && gamma_r < ir_hi)) {
        throw ConfigError("sections: I_R must lie in x > 0 with gamma_R interior");
    }
}

double scaling_exponent(const DecayData& decay) {
    if (decay.a2_excluded || !std::isfinite(decay.k_plus)) return 1.0;
    return 2.0 * decay.k_plus / (2.0 * decay.k_plus + 1.0);
}

ReturnSample q_map(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                   const SectionPair& sections, double x, double alpha, bool want_d2) {
    sections.validate();
    if (eps < 0.0) throw DomainError("q_map: eps must be >= 0");
    ReturnSample base = (eps == 0.0) ? q_pws(model, sections, x, alpha)
                                     : q_reg(model, fn, eps, sections, x, alpha);
    if (want_d2 && !base.d2) {
        // Richardson-extrapolated central difference of the variational d1;
        // the step must resolve the center window of width O(eps^{2k/(2k+1)}).
        const double h = std::max(1e-5, std::pow(eps, scaling_exponent(fn.decay)) / 100.0);
        const auto d1_at = [&](double xs) {
            return (eps == 0.0) ? q_pws(model, sections, xs, alpha).d1
                                : q_reg(model, fn, eps, sections, xs, alpha).d1;
        };
        const double full = (d1_at(x + h) - d1_at(x - h)) / (2.0 * h);
        const double half = (d1_at(x + 0.5 * h) - d1_at(x - 0.5 * h)) / h;
        base.d2 = (4.0 * half - full) / 3.0;
    }
    return base;
}

OrbitSegment p_map_segment(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                           const SectionPair& sections, double x, double alpha,
                           bool with_tangent, double t_max, double tol) {
    sections.validate();
    const SmoothField2D field =
        (eps == 0.0) ? model.z_plus : assemble_regularized(model, fn, eps);
    std::vector<EventSpec> evs{section_event(1, sections.delta, -1, true, kEvSection)};
    const std::optional<Vec2> v0 =
        with_tangent ? std::optional<Vec2>(Vec2{1.0, 0.0}) : std::nullopt;
    if (eps == 0.0) {
        return with_tangent
                   ? integrate_variational(field, {x, sections.delta}, {1.0, 0.0}, alpha,
                                           t_max, tol, evs)
                   : integrate(field, {x, sections.delta}, alpha, t_max, tol, evs);
    }
    return integrate_auto(field, {x, sections.delta}, v0, alpha, t_max, tol, eps, evs);
}

ReturnSample p_map(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                   const SectionPair& sections, double x, double alpha, bool want_d2,
                   double t_max, double tol) {
    const SmoothField2D field =
        (eps == 0.0) ? model.z_plus : assemble_regularized(model, fn, eps);
    const auto sample = [&](double xs) {
        const OrbitSegment orb =
            p_map_segment(model, fn, eps, sections, xs, alpha, true, t_max, tol);
        if (!orb.event_terminated) {
            throw NotFoundError("p_map: no return to the section within t_max");
        }
        const EventHit& hit = orb.events.back();
        ReturnSample out;
        out.x_out = hit.z[0];
        const Vec2 F = field.eval(hit.z[0], hit.z[1], alpha);
        out.d1 = project_tangent({hit.z[2], hit.z[3]}, F);
        out.flight_time = hit.t;
        return out;
    };
    ReturnSample base = sample(x);
    if (want_d2) {
        const double h =
            std::max(1e-6, std::pow(std::max(eps, 1e-12), scaling_exponent(fn.decay)) / 100.0);
        const double full = (sample(x + h).d1 - sample(x - h).d1) / (2.0 * h);
        const double half = (sample(x + 0.5 * h).d1 - sample(x - 0.5 * h).d1) / h;
        base.d2 = (4.0 * half - full) / 3.0;
    }
    return base;
}

Polyline p_map_orbit(const PwsModel& model, const RegFnDescriptor& fn, double eps,
                     const SectionPair& sections, double x, double alpha, double t_max,
                     double tol) {
    const OrbitSegment orb =
        p_map_segment(model, fn, eps, sections, x, alpha, false, t_max, tol);
    if (!orb.event_terminated) throw NotFoundError("p_map_orbit: no return within t_max");
    // Resample the dense output uniformly in time for a smooth polyline.
    const int n = 2000;
    Polyline poly;
    poly.reserve(n);
    for (int i = 0; i < n; ++i) {
        poly.push_back(orb.plane_at(orb.t_end * i / n));
    }
    return poly;
}

std::pair<double, double> min_y_of_orbit(const OrbitSegment& orbit) {
    if (orbit.states.empty()) throw DomainError("min_y_of_orbit: empty orbit");
    double best = orbit.states.front()[1];
    double t_best = 0.0;
    for (const StepRecord& rec : orbit.steps) {
        const double t_hi = std::min(rec.t0 + rec.h, orbit.t_end);
        if (t_hi <= rec.t0) continue;
        const double th_hi = (t_hi - rec.t0) / rec.h;
        const auto consider = [&](double th) {
            const double y = dense_eval(rec.c[1], th);
            if (y < best) {
                best = y;
                t_best = rec.t0 + th * rec.h;
            }
        };
        consider(th_hi);
        for (double th : dense_extrema_01(rec.c[1])) {
            if (th < th_hi) consider(th);
        }
    }
    return {best, t_best};
}

double point_polyline_distance(const Vec2& p, const Polyline& poly) {
    if (poly.empty()) throw DomainError("point_polyline_distance: empty polyline");
    if (poly.size() == 1) return (p - poly[0]).norm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];  // closed
        const Vec2 ab = b - a;
        const double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 proj = a + t * ab;
        best = std::min(best, (p - proj).norm());
    }
    return best;
}

double hausdorff_distance(const Polyline& a, const Polyline& b) {
    if (a.size() < 3 || b.size() < 3) {
        throw DomainError("hausdorff_distance: closed polylines need >= 3 points");
    }
    double h = 0.0;
    for (const Vec2& p : a) h = std::max(h, point_polyline_distance(p, b));
    for (const Vec2& p : b) h = std::max(h, point_polyline_distance(p, a));
    return h;
}

double measure_slow_manifold_exit(const PwsModel& model, const RegFnDescriptor& fn,
                                  double eps, const SectionPair& sections, double x_start) {
    sections.validate();
    if (!(eps > 0.0)) throw DomainError("measure_slow_manifold_exit: eps must be > 0");
    if (!(x_start < 0.0)) throw DomainError("slow-manifold start must lie in x < 0");
    const SmoothField2D field = assemble_regularized(model, fn, eps);
    OdeOptions opts;
    opts.escape_box = std::array<double, 4>{-2.0 * sections.xi, 2.0 * sections.xi,
                                            -0.5 * sections.xi, 2.0 * sections.delta};
    // Fiber-settling transient: a fraction of one sliding traversal.
    const double t_tr = 5.0 * std::abs(x_start) / (1.0 - 2.0 * x_start);
    const OrbitSegment pre = integrate_auto(field, {x_start, 0.0}, std::nullopt, 0.0, t_tr,
                                            1e-10, eps, {}, false, opts);
    const Vec2 z1 = pre.end_plane();
    std::vector<EventSpec> evs{section_event(1, sections.delta, +1, true, kEvSection)};
    const OrbitSegment ex = integrate_auto(field, z1, std::nullopt, 0.0, 100.0, 1e-10, eps,
                                           evs, false, opts);
    if (!ex.event_terminated) {
        throw EscapeError("measure_slow_manifold_exit: no exit crossing found");
    }
    return ex.events.back().z[0];
}

}  // namespace foldlab

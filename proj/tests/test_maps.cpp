#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "foldlab/maps.hpp"

using namespace foldlab;

namespace {

const double kPi = std::acos(-1.0);

Polyline circle(std::size_t n, double r, double cx = 0.0, double cy = 0.0) {
    Polyline p;
    p.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return p;
}

}  // namespace

// =============================================================================
// Scaling exponent 2k/(2k+1)
// =============================================================================

TEST_CASE("scaling exponent per switch family") {
    CHECK(scaling_exponent(decay_data(make_regfn(RegFnId::smooth_sqrt))) ==
          doctest::Approx(0.8).epsilon(1e-15));
    CHECK(scaling_exponent(decay_data(make_regfn(RegFnId::goldbeter_koshland))) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(scaling_exponent(decay_data(make_regfn(RegFnId::arctan))) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(scaling_exponent(decay_data(make_regfn(RegFnId::logistic))) == 1.0);
}

// =============================================================================
// Local transition map Q, singular composite (eps = 0)
// =============================================================================

TEST_CASE("composite Q: sliding branch lands on the tangent orbit") {
    // From (-0.35, 0.04) the Z+ flight reaches y = 0, slides to the fold,
    // and lifts off along y = x^2: exit exactly at gamma_R = 0.2 with zero
    // derivative (the slide forgets the entry point).
    const PwsModel nf = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form(0.04);
    const ReturnSample s = q_map(nf, fn, 0.0, sec, -0.35, 0.0);
    CHECK(s.slid);
    CHECK(s.x_out == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(s.d1 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s.flight_time > 0.0);
}

TEST_CASE("composite Q: crossing branch is the exact reflection") {
    // From (-0.1, 0.04): x0^2 < delta, so the parabolic orbit never reaches
    // the manifold and exits at -x0 with derivative -1.
    const PwsModel nf = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form(0.04);
    const ReturnSample s = q_map(nf, fn, 0.0, sec, -0.1, 0.0);
    CHECK_FALSE(s.slid);
    CHECK(s.x_out == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(s.d1 == doctest::Approx(-1.0).epsilon(1e-8));
}

// =============================================================================
// Local transition map Q, regularized (eps > 0)
// =============================================================================

TEST_CASE("regularized Q: derivatives agree with finite differences of x_out") {
    const PwsModel nf = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form(0.04);
    const double eps = 1e-3;

    auto xout = [&](double x) { return q_map(nf, fn, eps, sec, x, 0.0).x_out; };

    for (double x : {-0.35, -0.15, -0.05}) {
        const ReturnSample s = q_map(nf, fn, eps, sec, x, 0.0, true);
        const double h = 1e-4;
        const double fd1 = (xout(x + h) - xout(x - h)) / (2.0 * h);
        CHECK(std::abs(s.d1 - fd1) < 5e-4 * (1.0 + std::abs(fd1)));
        REQUIRE(s.d2.has_value());
        // d2 against a one-sided difference of d1 itself.
        const double d1p = q_map(nf, fn, eps, sec, x + h, 0.0).d1;
        const double d1m = q_map(nf, fn, eps, sec, x - h, 0.0).d1;
        CHECK(std::abs(*s.d2 - (d1p - d1m) / (2.0 * h)) < 1e-2 * (1.0 + std::abs(*s.d2)));
        CHECK_FALSE(s.slid);
    }
    // Deep in the sliding interval the regularized map is contracting toward
    // the singular limit: exit near gamma_R, derivative small and negative.
    const ReturnSample deep = q_map(nf, fn, eps, sec, -0.35, 0.0);
    CHECK(deep.x_out == doctest::Approx(0.2).epsilon(0.05));
    CHECK(deep.d1 < 0.0);
    CHECK(std::abs(deep.d1) < 0.2);
}

// =============================================================================
// Full return map P (friction oscillator)
// =============================================================================

TEST_CASE("return map P: fixed-point iteration finds the stable cycle") {
    // alpha well below the Hopf value: the stick-slip cycle attracts.
    const PwsModel fr = make_friction({1.0, 0.5, 4.0, 0.85});
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::friction(0.15);
    const double eps = 5e-3, alpha = 0.1;

    double x = -1.0;
    ReturnSample s{};
    for (int it = 0; it < 40; ++it) {
        s = p_map(fr, fn, eps, sec, x, alpha);
        if (std::abs(s.x_out - x) < 1e-10) break;
        x = s.x_out;
    }
    CHECK(std::abs(s.x_out - x) < 1e-9);
    CHECK(std::abs(s.d1) < 1.0);  // attracting
    CHECK(s.flight_time > 0.0);

    // Multiplier against finite differences of the return map.
    const double h = 1e-5;
    const double fd = (p_map(fr, fn, eps, sec, x + h, alpha).x_out -
                       p_map(fr, fn, eps, sec, x - h, alpha).x_out) /
                      (2.0 * h);
    CHECK(std::abs(s.d1 - fd) < 2e-3 * (1.0 + std::abs(fd)));

    // Segment / orbit views agree with the scalar map.
    const OrbitSegment seg = p_map_segment(fr, fn, eps, sec, x, alpha);
    CHECK(std::abs(seg.end_plane().y - sec.delta) < 1e-8);
    CHECK(std::abs(seg.end_plane().x - s.x_out) < 1e-8);
    const Polyline orb = p_map_orbit(fr, fn, eps, sec, x, alpha);
    CHECK(orb.size() > 10);
    CHECK(std::abs(orb.front().y - sec.delta) < 1e-8);
    // On the cycle the orbit is closed to map accuracy.
    CHECK((orb.front() - orb.back()).norm() < 1e-6);
}

TEST_CASE("return map P: no return raises NotFoundError") {
    // The pure upper flow from far outside runs away (or overflows the
    // friction law) before crossing the section downward again within the
    // time budget; either way there is no return object.
    const PwsModel fr = make_friction({1.0, 0.5, 4.0, 0.85});
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::friction(0.15);
    CHECK_THROWS(p_map(fr, fn, 0.0, sec, 3.0, 0.23, false, 5.0));
}

// =============================================================================
// Orbit statistics
// =============================================================================

TEST_CASE("minimum y of a dense orbit hits the analytic minimum") {
    const SmoothField2D harm = {
        [](double x, double y, double) { return Vec2{y, -x}; },
        [](double, double, double) { return Mat2{0.0, 1.0, -1.0, 0.0}; },
        [](double, double, double) { return Vec2{0.0, 0.0}; }};
    const OrbitSegment orb = integrate(harm, {1.0, 0.0}, 0.0, 2.0 * kPi, 1e-10);
    const auto [ymin, tmin] = min_y_of_orbit(orb);
    CHECK(ymin == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(tmin == doctest::Approx(0.5 * kPi).epsilon(1e-6));
}

TEST_CASE("Hausdorff distance on synthetic polylines") {
    const Polyline c1 = circle(2000, 1.0);
    const Polyline c2 = circle(2000, 1.3);
    const Polyline c3 = circle(2000, 1.0, 0.05, 0.0);

    CHECK(hausdorff_distance(c1, c1) == 0.0);
    CHECK(hausdorff_distance(c1, c2) == doctest::Approx(0.3).epsilon(1e-4));
    CHECK(hausdorff_distance(c1, c3) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(hausdorff_distance(c1, c2) == hausdorff_distance(c2, c1));

    // Coarse squares exercise the point-to-segment projection.
    const Polyline sq1 = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Polyline sq2 = {{0.2, 0}, {1.2, 0}, {1.2, 1}, {0.2, 1}};
    CHECK(hausdorff_distance(sq1, sq2) == doctest::Approx(0.2).epsilon(1e-12));

    CHECK(point_polyline_distance({2.0, 0.0}, c1) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("slow-manifold exit approaches gamma_R from below at the 4/5 rate") {
    const PwsModel nf = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form(0.04);
    const double m3 = measure_slow_manifold_exit(nf, fn, 1e-3, sec);
    const double m4 = measure_slow_manifold_exit(nf, fn, 1e-4, sec);
    CHECK(m3 < sec.gamma_r);
    CHECK(m4 < sec.gamma_r);
    CHECK(m4 > m3);  // smaller eps exits closer to the tangent orbit
    const double slope =
        std::log((sec.gamma_r - m3) / (sec.gamma_r - m4)) / std::log(10.0);
    CHECK(slope > 0.65);
    CHECK(slope < 0.95);
}

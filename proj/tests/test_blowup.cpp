#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "foldlab/blowup.hpp"

using namespace foldlab;

// =============================================================================
// Cylinder charts
// =============================================================================

TEST_CASE("cylinder charts map to Cartesian coordinates") {
    // (r1, eps1) = (0.3, 0.2): y = 0.3, eps = 0.06.
    const ChartPoint p = make_cyl(ChartId::cyl_y1, 0.3, 0.2);
    const auto [y, eps] = cyl_to_cartesian(p);
    CHECK(y == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(eps == doctest::Approx(0.06).epsilon(1e-15));

    const ChartPoint q = make_cyl(ChartId::cyl_eps2, 0.06, 5.0);
    const auto [y2, eps2] = cyl_to_cartesian(q);
    CHECK(y2 == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(eps2 == doctest::Approx(0.06).epsilon(1e-15));

    // Lower chart covers y < 0.
    const ChartPoint m = make_cyl(ChartId::cyl_ym3, 0.3, 0.2);
    CHECK(cyl_to_cartesian(m).first == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("cylinder chart changes round trip on the overlap") {
    const ChartPoint p = make_cyl(ChartId::cyl_y1, 0.47, 0.031);
    const ChartPoint q = cyl_chart_change(p, ChartId::cyl_eps2);
    CHECK(q.id == ChartId::cyl_eps2);
    const ChartPoint back = cyl_chart_change(q, ChartId::cyl_y1);
    CHECK(std::abs(back.coords[0] - p.coords[0]) <= 1e-13 * std::max(1.0, p.coords[0]));
    CHECK(std::abs(back.coords[1] - p.coords[1]) <= 1e-13 * std::max(1.0, p.coords[1]));
    // Both present the same Cartesian point (y, eps).
    CHECK(cyl_to_cartesian(q).first == doctest::Approx(0.47).epsilon(1e-14));
    CHECK(cyl_to_cartesian(q).second ==
          doctest::Approx(0.47 * 0.031).epsilon(1e-14));

    // Off the overlap: eps1 = 0 has no eps-chart image.
    CHECK_THROWS_AS(cyl_chart_change(make_cyl(ChartId::cyl_y1, 0.3, 0.0),
                                     ChartId::cyl_eps2),
                    DomainError);
    // The upper and lower cylinder charts never overlap.
    CHECK_THROWS_AS(cyl_chart_change(p, ChartId::cyl_ym3), DomainError);
}

TEST_CASE("chart point validation") {
    CHECK_THROWS_AS(make_cyl(ChartId::cyl_y1, -0.1, 0.2).validate(), DomainError);
    CHECK_THROWS_AS(make_sph(ChartId::sph_r1, 0.2, 0.5, 1.0, 0).validate(), DomainError);
    CHECK_NOTHROW(make_sph(ChartId::sph_r1, 0.2, 0.5, 1.0, 2).validate());
}

// =============================================================================
// Weighted sphere charts
// =============================================================================

TEST_CASE("sphere chart 1 from Cartesian data, k = 2") {
    // (x, y, eps) = (0.02, 0.0016, 1e-5 * 0.2^5): rho1 = y^{1/4} = 0.2,
    // x1 = x / y^{1/2} = 0.5, eps1 = eps / rho1^5 = 1e-5.
    const double rho = 0.2;
    const ChartPoint p =
        sphere_from_cartesian(0.02, 0.0016, 1e-5 * std::pow(rho, 5), 2);
    CHECK(p.coords[0] == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(p.coords[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(p.coords[2] == doctest::Approx(1e-5).epsilon(1e-12));

    const auto cart = sphere_to_cartesian(p);
    CHECK(cart[0] == doctest::Approx(0.02).epsilon(1e-13));
    CHECK(cart[1] == doctest::Approx(0.0016).epsilon(1e-13));
    CHECK(cart[2] == doctest::Approx(1e-5 * std::pow(rho, 5)).epsilon(1e-13));
}

TEST_CASE("sphere chart changes: round trip, conservation, scale weights") {
    std::mt19937 rng(20260815);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> ulog(-3.0, 0.0);
    std::uniform_real_distribution<double> ueps(-6.0, -2.0);

    for (int k : {1, 2, 3}) {
        for (int trial = 0; trial < 25; ++trial) {
            const double x = ux(rng);
            const double y = std::pow(10.0, ulog(rng));
            const double eps = std::pow(10.0, ueps(rng));

            const ChartPoint p1 = sphere_from_cartesian(x, y, eps, k);
            const ChartPoint p2 = sphere_chart_change(p1, ChartId::sph_eps2);
            const ChartPoint b1 = sphere_chart_change(p2, ChartId::sph_r1);

            for (int i = 0; i < 3; ++i) {
                const double ref = std::max(1.0, std::abs(p1.coords[i]));
                CHECK(std::abs(b1.coords[i] - p1.coords[i]) <= 1e-13 * ref);
            }

            // Both charts present the same Cartesian point...
            const auto c2 = sphere_to_cartesian(p2);
            CHECK(std::abs(c2[0] - x) <= 1e-12 * std::max(1.0, std::abs(x)));
            CHECK(std::abs(c2[1] - y) <= 1e-12 * std::max(1.0, y));
            CHECK(std::abs(c2[2] - eps) <= 1e-12 * eps);
            // ... and agree on the invariant rho^{2k+1} * (radial two).
            CHECK(std::abs(sphere_conservation(p1) - eps) <= 1e-12 * eps);
            CHECK(std::abs(sphere_conservation(p2) - eps) <= 1e-12 * eps);

            // Weighted-scale equivariance: (x, y, eps) ->
            // (L^k x, L^{2k} y, L^{2k+1} eps) multiplies rho1 by L and fixes
            // the angular coordinates.
            const double L = 1.37;
            const ChartPoint ps = sphere_from_cartesian(
                std::pow(L, k) * x, std::pow(L, 2 * k) * y,
                std::pow(L, 2 * k + 1) * eps, k);
            CHECK(ps.coords[0] ==
                  doctest::Approx(L * p1.coords[0]).epsilon(1e-12));
            CHECK(ps.coords[1] == doctest::Approx(p1.coords[1]).epsilon(1e-11));
            CHECK(ps.coords[2] == doctest::Approx(p1.coords[2]).epsilon(1e-11));
        }
    }
}

TEST_CASE("sphere chart domain guards") {
    // Chart changes need the overlap coordinate strictly positive.
    const ChartPoint p = make_sph(ChartId::sph_r1, 0.2, 0.5, 0.0, 2);  // eps1 = 0
    CHECK_THROWS_AS(sphere_chart_change(p, ChartId::sph_eps2), DomainError);
    // y <= 0 has no chart-1 preimage off the blowup locus.
    CHECK_THROWS_AS(sphere_from_cartesian(0.1, 0.0, 1e-5, 2), DomainError);
    CHECK_THROWS_AS(sphere_from_cartesian(0.1, -0.2, 1e-5, 2), DomainError);
}

// =============================================================================
// Q-map region report (fast single-eps smoke; the acceptance suite runs the
// full grids)
// =============================================================================

TEST_CASE("region report windows scale with eps^{2k/(2k+1)}") {
    const PwsModel nf = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form(0.04);
    const std::vector<RegionStats> rep =
        q_region_report(nf, fn, {4e-4}, sec, 12.0, 0.006, 8);
    REQUIRE(rep.size() == 1);
    const RegionStats& r = rep[0];
    CHECK(r.p_exp == doctest::Approx(0.8).epsilon(1e-15));
    const double w = 12.0 * std::pow(4e-4, 0.8);
    CHECK(r.ii_hi - r.ii_lo == doctest::Approx(w * (1.0 + 1.0 / 6.0)).epsilon(1e-12));
    // All sampled derivatives in the center window decrease concavely.
    CHECK(r.n_ok_ii == 8);
    CHECK(r.n_d1_neg == 8);
    CHECK(r.n_d2_neg == 8);
    CHECK(r.unique_half_crossing);
    CHECK(r.x_half_crossing > r.ii_lo);
    CHECK(r.x_half_crossing < r.ii_hi);
    // Contraction region: derivative far below 1 already at this eps.
    CHECK(r.max_abs_d1_i < 0.05);
    CHECK(r.samples_i.size() == 8);
}

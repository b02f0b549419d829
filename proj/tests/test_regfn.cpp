#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "foldlab/regfn.hpp"

using namespace foldlab;

namespace {

double fd_deriv(const RegFnDescriptor& fn, double s, double eps) {
    const double h = 1e-6 * std::max(1.0, std::abs(s));
    return (eval(fn, s + h, eps) - eval(fn, s - h, eps)) / (2.0 * h);
}

const std::vector<RegFnId> kAllIds = {RegFnId::smooth_sqrt, RegFnId::goldbeter_koshland,
                                      RegFnId::arctan, RegFnId::logistic};

}  // namespace

// =============================================================================
// Switch properties shared by every family
// =============================================================================

TEST_CASE("all families: range, monotonicity, and limits") {
    const std::vector<double> grid = {-30.0, -8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0, 30.0};
    for (RegFnId id : kAllIds) {
        const RegFnDescriptor fn = make_regfn(id);
        double prev = -1.0;
        for (double s : grid) {
            const double p = eval(fn, s, 0.0);
            CHECK(p > 0.0);
            CHECK(p <= 1.0);  // logistic saturates to 1.0 in double precision
            CHECK(p > prev);  // strictly increasing on this grid
            prev = p;
        }
        CHECK(eval(fn, -1e8, 0.0) < 1e-7);
        CHECK(eval(fn, 1e8, 0.0) > 1.0 - 1e-7);
    }
}

TEST_CASE("all families: analytic derivative matches central differences") {
    const std::vector<double> grid = {-5.0, -1.3, -0.2, 0.0, 0.4, 1.7, 6.0};
    for (RegFnId id : kAllIds) {
        const RegFnDescriptor fn = make_regfn(id);
        for (double s : grid) {
            const double a = deriv_s(fn, s, 0.0);
            CHECK(a > 0.0);
            CHECK(a == doctest::Approx(fd_deriv(fn, s, 0.0)).epsilon(1e-7));
        }
    }
}

TEST_CASE("argument checking") {
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    CHECK_THROWS_AS(eval(fn, std::nan(""), 0.0), DomainError);
    CHECK_THROWS_AS(eval(fn, 0.0, -1e-3), DomainError);
    CHECK_THROWS_AS(deriv_s(fn, 1.0 / 0.0, 0.0), DomainError);
}

TEST_CASE("name factory round trips; unknown names rejected") {
    for (RegFnId id : kAllIds) {
        CHECK(make_regfn(regfn_name(id)).id == id);
    }
    CHECK_THROWS_AS(make_regfn("sigmoidal"), ConfigError);
}

// =============================================================================
// smooth_sqrt: k = 2 with tail prefactor 1/4
// =============================================================================

TEST_CASE("smooth_sqrt: values and quadratic tail") {
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    CHECK(eval(fn, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval(fn, 1.0, 0.0) ==
          doctest::Approx(0.5 * (1.0 + 1.0 / std::sqrt(2.0))).epsilon(1e-15));

    // 1 - phi(1/e1) = (1/4) e1^2 (1 + O(e1^2)): the k = 2 decay with
    // prefactor phi_plus_00 = 1/4, and symmetrically at the lower tail.
    for (double e1 : {1e-2, 1e-3, 1e-4}) {
        CHECK((1.0 - eval(fn, 1.0 / e1, 0.0)) / (e1 * e1) ==
              doctest::Approx(0.25).epsilon(4.0 * e1 * e1 + 1e-9));
        CHECK(eval(fn, -1.0 / e1, 0.0) / (e1 * e1) ==
              doctest::Approx(0.25).epsilon(4.0 * e1 * e1 + 1e-9));
    }
    const DecayData d = decay_data(fn);
    CHECK(d.k_plus == 2.0);
    CHECK(d.phi_plus_00 == 0.25);
    CHECK_FALSE(d.a2_excluded);

    // The conjugate rearrangement keeps the upper tail exact where the naive
    // form would round to 1.
    CHECK(eval(fn, 1e7, 0.0) < 1.0);
    CHECK(1.0 - eval(fn, 1e7, 0.0) == doctest::Approx(0.25e-14).epsilon(1e-6));
}

// =============================================================================
// goldbeter_koshland: two-argument switch, k = 1
// =============================================================================

TEST_CASE("goldbeter_koshland: frozen oracle value") {
    // Independent high-precision evaluation of the raw rational/sqrt
    // expression at (s, eps) = (10, 0.01), frozen before implementation.
    const RegFnDescriptor fn = make_regfn(RegFnId::goldbeter_koshland);
    CHECK(eval(fn, 10.0, 0.01) ==
          doctest::Approx(0.91165951902981576).epsilon(1e-14));
}

TEST_CASE("goldbeter_koshland: eps = 0 closed form and eps -> 0 consistency") {
    const RegFnDescriptor fn = make_regfn(RegFnId::goldbeter_koshland);
    for (double s : {-4.0, -1.0, 0.0, 0.7, 3.0}) {
        const double closed = 2.0 / (2.0 - s + std::sqrt(s * s + 4.0));
        CHECK(eval(fn, s, 0.0) == doctest::Approx(closed).epsilon(1e-14));
        CHECK(eval(fn, s, 1e-8) == doctest::Approx(closed).epsilon(1e-6));
    }
    CHECK(eval(fn, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("goldbeter_koshland: k = 1 tails with prefactor 1") {
    const RegFnDescriptor fn = make_regfn(RegFnId::goldbeter_koshland);
    for (double e1 : {1e-3, 1e-5}) {
        CHECK((1.0 - eval(fn, 1.0 / e1, 0.0)) / e1 ==
              doctest::Approx(1.0).epsilon(10.0 * e1));
        CHECK(eval(fn, -1.0 / e1, 0.0) / e1 == doctest::Approx(1.0).epsilon(10.0 * e1));
    }
    const DecayData d = decay_data(fn);
    CHECK(d.k_plus == 1.0);
    CHECK(d.phi_plus_00 == 1.0);
}

TEST_CASE("goldbeter_koshland: rearranged branches stay accurate and smooth") {
    const RegFnDescriptor fn = make_regfn(RegFnId::goldbeter_koshland);
    // Large |s| with eps > 0: the naive numerator/denominator would lose all
    // digits to cancellation; the rearranged forms must stay in (0, 1).
    CHECK(eval(fn, 1e8, 0.3) > 0.999);
    CHECK(eval(fn, 1e8, 0.3) <= 1.0);
    CHECK(eval(fn, -1e8, 0.3) > 0.0);
    CHECK(eval(fn, -1e8, 0.3) < 1e-6);
    // Branch seam at s = 0.
    CHECK(eval(fn, 1e-14, 0.2) == doctest::Approx(eval(fn, -1e-14, 0.2)).epsilon(1e-10));
    // Derivative against FD for the two-argument form.
    for (double s : {-7.0, -0.3, 0.0, 2.0, 11.0}) {
        CHECK(deriv_s(fn, s, 0.05) ==
              doctest::Approx(fd_deriv(fn, s, 0.05)).epsilon(1e-7));
    }
}

// =============================================================================
// arctan: k = 1 with prefactor 1/pi
// =============================================================================

TEST_CASE("arctan: values and tails") {
    const RegFnDescriptor fn = make_regfn(RegFnId::arctan);
    CHECK(eval(fn, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double e1 : {1e-3, 1e-5}) {
        CHECK((1.0 - eval(fn, 1.0 / e1, 0.0)) / e1 ==
              doctest::Approx(1.0 / M_PI).epsilon(1e-4));
    }
    const DecayData d = decay_data(fn);
    CHECK(d.k_plus == 1.0);
    CHECK(d.phi_plus_00 == doctest::Approx(1.0 / M_PI).epsilon(1e-15));
}

// =============================================================================
// logistic: super-algebraic tails, excluded from the algebraic-decay theory
// =============================================================================

TEST_CASE("logistic: a2 exclusion and representability limits") {
    const RegFnDescriptor fn = make_regfn(RegFnId::logistic);
    const DecayData d = decay_data(fn);
    CHECK(d.a2_excluded);
    CHECK(std::isinf(d.k_plus));

    // Tail saturates to exactly 1.0 once exp(-s) drops below the ulp of 1.
    CHECK(eval(fn, 40.0, 0.0) == 1.0);
    CHECK(eval(fn, 35.0, 0.0) < 1.0);
    // Derivative underflows to zero near |s| ~ 745 (exp range limit).
    CHECK(deriv_s(fn, 800.0, 0.0) == 0.0);
    CHECK(deriv_s(fn, 700.0, 0.0) > 0.0);
}

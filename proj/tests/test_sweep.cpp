#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "foldlab/sweep.hpp"

using namespace foldlab;

namespace {

const double kPi = std::acos(-1.0);

Polyline wobbly(std::size_t n, double r, double phase) {
    Polyline p;
    p.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const double rr = r * (1.0 + 0.08 * std::sin(5.0 * a + phase));
        p.push_back({rr * std::cos(a), rr * std::sin(a)});
    }
    return p;
}

}  // namespace

TEST_CASE("effective job counts") {
    CHECK(effective_jobs(1) == 1);
    CHECK(effective_jobs(3) == 3);
    CHECK(effective_jobs(0) >= 1);
    CHECK(effective_jobs(-2) >= 1);
}

TEST_CASE("run_parallel covers every index exactly once") {
    for (int jobs : {1, 0, 4}) {
        std::vector<std::atomic<int>> hits(257);
        for (auto& h : hits) h.store(0);
        run_parallel(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); }, jobs);
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("run_parallel propagates the body's exception") {
    CHECK_THROWS_AS(run_parallel(
                        64,
                        [](std::size_t i) {
                            if (i == 13) throw DomainError("boom at 13");
                        },
                        0),
                    DomainError);
    // Serial path too.
    CHECK_THROWS_AS(run_parallel(
                        8, [](std::size_t) { throw ConvergenceError("always"); }, 1),
                    ConvergenceError);
}

TEST_CASE("parallel Hausdorff is bit-identical to the serial kernel") {
    const Polyline a = wobbly(3001, 1.0, 0.0);
    const Polyline b = wobbly(2999, 1.15, 0.7);
    const double serial = hausdorff_distance(a, b);
    for (int jobs : {0, 2, 5}) {
        CHECK(hausdorff_parallel(a, b, jobs) == serial);
    }
    CHECK(hausdorff_parallel(a, a, 0) == 0.0);
    CHECK(serial > 0.0);
}

TEST_CASE("q-grid sweep matches pointwise evaluation and reports failures") {
    const PwsModel nf = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form(0.04);
    const double eps = 1e-3;

    std::vector<double> grid;
    for (int i = 0; i < 24; ++i) grid.push_back(-0.42 + 0.015 * i);

    const std::vector<GridSample> par = sweep_q_grid(nf, fn, eps, sec, grid, 0.0, false, 0);
    const std::vector<GridSample> ser = sweep_q_grid(nf, fn, eps, sec, grid, 0.0, false, 1);
    REQUIRE(par.size() == grid.size());
    REQUIRE(ser.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(par[i].ok);
        REQUIRE(ser[i].ok);
        // Identical code path per point: bitwise agreement.
        CHECK(par[i].sample.x_out == ser[i].sample.x_out);
        CHECK(par[i].sample.d1 == ser[i].sample.d1);
        // Spot check against the scalar entry point.
        if (i % 7 == 0) {
            const ReturnSample one = q_map(nf, fn, eps, sec, grid[i], 0.0);
            CHECK(one.x_out == par[i].sample.x_out);
        }
    }

    // A point outside the chart box fails soft: flagged, not thrown.
    const std::vector<GridSample> bad =
        sweep_q_grid(nf, fn, eps, sec, {-0.2, 97.0}, 0.0, false, 0);
    CHECK(bad[0].ok);
    CHECK_FALSE(bad[1].ok);
    CHECK_FALSE(bad[1].error.empty());
}

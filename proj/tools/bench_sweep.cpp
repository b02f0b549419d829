// Benchmark of the OpenMP kernels against their serial reference
// implementations: the Hausdorff double loop and a transition-map x grid.
// Also verifies that parallel and serial results agree to the last bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "foldlab/maps.hpp"
#include "foldlab/models.hpp"
#include "foldlab/regfn.hpp"
#include "foldlab/sweep.hpp"

using namespace foldlab;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Polyline wobbly_circle(std::size_t n, double r, double phase) {
    Polyline p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        const double rr = r * (1.0 + 0.05 * std::sin(7.0 * t + phase));
        p[i] = {rr * std::cos(t), rr * std::sin(t)};
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    const int jobs = argc > 1 ? std::atoi(argv[1]) : 0;
    std::printf("threads available: %d (requested %d)\n", effective_jobs(0), jobs);

    // --- Hausdorff double loop -------------------------------------------
    const Polyline a = wobbly_circle(6000, 1.0, 0.0);
    const Polyline b = wobbly_circle(6000, 1.02, 0.4);

    double t0 = now_s();
    const double d_serial = hausdorff_distance(a, b);
    const double t_serial = now_s() - t0;

    t0 = now_s();
    const double d_par = hausdorff_parallel(a, b, jobs);
    const double t_par = now_s() - t0;

    std::printf("hausdorff 6000x6000: serial %.3fs, parallel %.3fs, speedup %.2fx\n",
                t_serial, t_par, t_serial / t_par);
    if (d_serial != d_par) {
        std::printf("MISMATCH: serial %.17g != parallel %.17g\n", d_serial, d_par);
        return 1;
    }

    // --- Transition-map x grid -------------------------------------------
    const PwsModel model = make_normal_form();
    const RegFnDescriptor fn = make_regfn(RegFnId::smooth_sqrt);
    const SectionPair sec = SectionPair::normal_form();
    std::vector<double> grid(96);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = sec.il_lo + (sec.il_hi - sec.il_lo) * static_cast<double>(i) /
                                  static_cast<double>(grid.size() - 1);
    }

    t0 = now_s();
    const std::vector<GridSample> gs = sweep_q_grid(model, fn, 1e-4, sec, grid, 0.0,
                                                    true, 1);
    const double t_grid_serial = now_s() - t0;

    t0 = now_s();
    const std::vector<GridSample> gp = sweep_q_grid(model, fn, 1e-4, sec, grid, 0.0,
                                                    true, jobs);
    const double t_grid_par = now_s() - t0;

    std::printf("q grid 96 pts, eps 1e-4: serial %.3fs, parallel %.3fs, speedup %.2fx\n",
                t_grid_serial, t_grid_par, t_grid_serial / t_grid_par);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (gs[i].ok != gp[i].ok ||
            (gs[i].ok && gs[i].sample.x_out != gp[i].sample.x_out)) {
            std::printf("MISMATCH at grid index %zu\n", i);
            return 1;
        }
    }
    std::printf("parallel results match serial bit-for-bit\n");
    return 0;
}

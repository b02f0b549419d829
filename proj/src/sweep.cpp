#include "foldlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace foldlab {

int effective_jobs(int requested) {
#ifdef _OPENMP
    if (requested <= 0) return omp_get_max_threads();
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

void run_parallel(std::size_t n, const std::function<void(std::size_t)>& body, int jobs) {
    const int nt = effective_jobs(jobs);
    if (nt == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr first;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(foldlab_run_parallel)
            {
                if (!first) first = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (first) std::rethrow_exception(first);
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

double hausdorff_parallel(const Polyline& a, const Polyline& b, int jobs) {
    if (a.size() < 3 || b.size() < 3) {
        throw DomainError("hausdorff_parallel: closed polylines need >= 3 points");
    }
    const std::size_t n = a.size() + b.size();
    std::vector<double> d(n, 0.0);
    run_parallel(
        n,
        [&](std::size_t i) {
            d[i] = (i < a.size()) ? point_polyline_distance(a[i], b)
                                  : point_polyline_distance(b[i - a.size()], a);
        },
        jobs);
    return *std::max_element(d.begin(), d.end());
}

std::vector<GridSample> sweep_q_grid(const PwsModel& model, const RegFnDescriptor& fn,
                                     double eps, const SectionPair& sections,
                                     const std::vector<double>& x_grid, double alpha,
                                     bool want_d2, int jobs) {
    std::vector<GridSample> out(x_grid.size());
    run_parallel(
        x_grid.size(),
        [&](std::size_t i) {
            out[i].x = x_grid[i];
            try {
                out[i].sample = q_map(model, fn, eps, sections, x_grid[i], alpha, want_d2);
                out[i].ok = true;
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        },
        jobs);
    return out;
}

}  // namespace foldlab

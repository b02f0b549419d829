#pragma once

// Parallel kernels for the embarrassingly parallel layers (x-grids, eps
// sweeps, Hausdorff double loops) with serial reference implementations for
// testing.  Parallelism uses OpenMP when compiled in; jobs = 1 forces the
// serial path, jobs = 0 uses the OpenMP default team size.

#include <cstddef>
#include <functional>
#include <vector>

#include "foldlab/maps.hpp"

namespace foldlab {

/// Threads a request resolves to (1 without OpenMP).
int effective_jobs(int requested);

/// Run body(i) for i in [0, n), in parallel when jobs != 1 and OpenMP is
/// available.  The first exception thrown by any body is rethrown after the
/// loop completes; remaining iterations are skipped best-effort.
void run_parallel(std::size_t n, const std::function<void(std::size_t)>& body,
                  int jobs = 0);

/// Parallel exact Hausdorff distance; must agree with the serial
/// hausdorff_distance to the last bit (same arithmetic per vertex, max
/// reduction is order-independent).
double hausdorff_parallel(const Polyline& a, const Polyline& b, int jobs = 0);

/// Evaluate q_map over an x grid.  Entries that throw are reported with
/// ok = false and the error message.
struct GridSample {
    double x = 0.0;
    bool ok = false;
    ReturnSample sample;
    std::string error;
};

std::vector<GridSample> sweep_q_grid(const PwsModel& model, const RegFnDescriptor& fn,
                                     double eps, const SectionPair& sections,
                                     const std::vector<double>& x_grid, double alpha,
                                     bool want_d2, int jobs = 0);

}  // namespace foldlab

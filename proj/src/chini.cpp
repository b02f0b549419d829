#include "foldlab/chini.hpp"

#include <cmath>
#include <string>

#include "foldlab/integrate.hpp"
#include "foldlab/sweep.hpp"

namespace foldlab {

namespace {

constexpr double kVFloor = 1e-6;  // v^{-k-1} amplifies error below this
constexpr int kEvReturn = 1;
constexpr int kEvVFloor = 2;

// Augmented state (u, v, v1, v2):
//   u'  = 1
//   v'  = 2u + v^{-k}
//   v1' = 2 - k v^{-k-1} v1
//   v2' = -k v^{-k-1} v2 + k (k+1) v^{-k-2} v1^2
RhsFn chini_rhs(int k) {
    return [k](double, const double* z, double* dz) {
        const double v = z[1];
        const double vk1 = std::pow(v, -k - 1);  // v^{-k-1}
        dz[0] = 1.0;
        dz[1] = 2.0 * z[0] + vk1 * v;  // v^{-k}
        dz[2] = 2.0 - k * vk1 * z[2];
        dz[3] = -k * vk1 * z[3] + k * (k + 1.0) * (vk1 / v) * z[2] * z[2];
    };
}

struct RawReturn {
    double T;
    std::array<double, 4> z;
};

RawReturn chini_run(const ChiniConfig& cfg, double tol) {
    cfg.validate();
    const double z0[4] = {cfg.u0, cfg.c, 0.0, 0.0};
    OdeOptions opts;
    opts.tol = tol;
    std::vector<EventSpec> evs{section_event(1, cfg.c, +1, true, kEvReturn),
                               section_event(1, kVFloor, -1, true, kEvVFloor)};
    const double ck = std::pow(cfg.c, -cfg.k);
    const double t_max = 4.0 * (std::abs(cfg.u0) + ck + 2.0) + 10.0;
    const OrbitSegment orb = integrate_ode(chini_rhs(cfg.k), 4, z0, t_max, evs, opts);
    if (!orb.event_terminated) {
        throw NotFoundError("chini: no return to v = c within t_max");
    }
    const EventHit& hit = orb.events.back();
    if (hit.event_id == kEvVFloor) {
        throw SingularityError("chini: v fell below the 1e-6 guard");
    }
    return {hit.t, hit.z};
}

}  // namespace

void ChiniConfig::validate() const {
    if (k < 1) throw DomainError("chini: k must be a positive integer");
    if (!(c > 0.0)) throw DomainError("chini: section level c must be > 0");
    const double margin = 2.0 * u0 + std::pow(c, -k);
    if (margin >= 0.0) {
        throw DomainError("chini: u0 must satisfy 2 u0 + c^{-k} < 0 (incoming section)");
    }
    if (std::abs(margin) < 1e-4) {
        throw DomainError("chini: u0 inside the excluded boundary layer |2u0+c^-k| < 1e-4");
    }
}

double ChiniConfig::boundary_u() const { return -0.5 * std::pow(c, -k); }

ChiniResult chini_transition(const ChiniConfig& cfg, double tol) {
    const RawReturn r = chini_run(cfg, tol);
    ChiniResult out;
    out.T = r.T;
    out.U = cfg.u0 + r.T;
    out.vdot_T = 2.0 * r.z[0] + std::pow(r.z[1], -cfg.k);
    out.v1_T = r.z[2];
    out.v2_T = r.z[3];
    out.w_T = 2.0 * out.vdot_T - out.v1_T;
    return out;
}

ChiniResult chini_derivatives(const ChiniConfig& cfg, double tol) {
    ChiniResult out = chini_transition(cfg, tol);
    const RawReturn r = {out.T, {out.U, cfg.c, out.v1_T, out.v2_T}};
    const double v = r.z[1];
    const double vt = out.vdot_T;
    if (std::abs(vt) < 1e-10) {
        throw SingularityError("chini: tangential return, map derivative undefined");
    }
    // Differentiate v(T(u0), u0) = c twice:
    //   T'  = -v1 / v_t
    //   T'' = -(v_tt T'^2 + 2 v_tu T' + v2) / v_t
    // with v_tt = 2 - k v^{-k-1} v_t and v_tu = v1' = 2 - k v^{-k-1} v1.
    const double vk1 = std::pow(v, -cfg.k - 1);
    const double tp = -out.v1_T / vt;
    const double v_tt = 2.0 - cfg.k * vk1 * vt;
    const double v_tu = 2.0 - cfg.k * vk1 * out.v1_T;
    const double tpp = -(v_tt * tp * tp + 2.0 * v_tu * tp + out.v2_T) / vt;
    out.U1 = 1.0 + tp;
    out.U2 = tpp;
    return out;
}

double chini_boundary_tprime(int k, double c, double u0) {
    const double ck = std::pow(c, -k);
    return -2.0 - (2.0 / 3.0) * k * std::pow(c, -k - 1) * (ck + 2.0 * u0);
}

ChiniScanReport chini_property_scan(int k, double c, const std::vector<double>& u0_grid,
                                    double tol) {
    ChiniScanReport rep;
    rep.rows.resize(u0_grid.size());
    std::vector<std::string> errs(u0_grid.size());
    run_parallel(u0_grid.size(), [&](std::size_t i) {
        ChiniConfig cfg;
        cfg.k = k;
        cfg.c = c;
        cfg.u0 = u0_grid[i];
        try {
            const ChiniResult r = chini_derivatives(cfg, tol);
            rep.rows[i] = {cfg.u0, r.T, r.U, r.U1, r.U2, r.v1_T, r.w_T};
        } catch (const std::exception& e) {
            errs[i] = e.what();
        }
    });

    rep.all_pass = true;
    bool first = true;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        if (!errs[i].empty()) {
            rep.all_pass = false;
            rep.violations.push_back("u0 = " + std::to_string(u0_grid[i]) + ": " + errs[i]);
            continue;
        }
        const ChiniScanRow& row = rep.rows[i];
        const double g_low = row.U1 - (-1.0);
        const double g_high = -row.U1;
        const double g_u2 = -row.U2;
        if (first) {
            rep.min_u1_gap_low = g_low;
            rep.min_u1_gap_high = g_high;
            rep.min_neg_u2 = g_u2;
            rep.min_v1 = row.v1_T;
            rep.min_w = row.w_T;
            first = false;
        } else {
            rep.min_u1_gap_low = std::min(rep.min_u1_gap_low, g_low);
            rep.min_u1_gap_high = std::min(rep.min_u1_gap_high, g_high);
            rep.min_neg_u2 = std::min(rep.min_neg_u2, g_u2);
            rep.min_v1 = std::min(rep.min_v1, row.v1_T);
            rep.min_w = std::min(rep.min_w, row.w_T);
        }
        if (!(g_low > 0.0 && g_high > 0.0 && g_u2 > 0.0 && row.v1_T > 0.0 &&
              row.w_T > 0.0)) {
            rep.all_pass = false;
            rep.violations.push_back("sign condition failed at u0 = " +
                                     std::to_string(row.u0));
        }
    }
    if (first) rep.all_pass = false;  // nothing succeeded
    return rep;
}

std::vector<double> chini_default_grid(int k, double c, int n, double u_lo) {
    if (n < 2) throw DomainError("chini grid needs >= 2 points");
    const double u_b = -0.5 * std::pow(c, -k);
    const double u_hi = u_b - 1e-4;  // keep |2u0 + c^-k| >= 2e-4
    if (!(u_lo < u_hi)) throw DomainError("chini grid: u_lo must lie left of the boundary");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = u_lo + (u_hi - u_lo) * i / (n - 1);
    }
    return g;
}

}  // namespace foldlab

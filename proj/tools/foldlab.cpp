// foldlab batch runner: config-driven experiments emitting deterministic CSV
// tables and JSON summaries.  Exit codes: 0 all asserted invariants pass,
// 1 config error, 2 numeric failure, 3 invariant failure (partial failures
// enumerated in the summary JSON).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foldlab/blowup.hpp"
#include "foldlab/chini.hpp"
#include "foldlab/config.hpp"
#include "foldlab/continuation.hpp"
#include "foldlab/csvio.hpp"
#include "foldlab/integrate.hpp"
#include "foldlab/maps.hpp"
#include "foldlab/models.hpp"
#include "foldlab/regfn.hpp"
#include "foldlab/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace foldlab;

namespace {

struct RunContext {
    ExperimentConfig cfg;
    fs::path out;
    int jobs = 0;
};

void write_summary(const RunContext& ctx, const std::string& stem, const json& j) {
    write_text_file(ctx.out / (stem + "_summary.json"), j.dump(2) + "\n");
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return g;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const PwsModel model = build_model(cfg);
    const double eps = cfg.simulate.eps;
    const SmoothField2D field =
        (eps == 0.0) ? model.z_plus : assemble_regularized(model, build_regfn(cfg), eps);
    const Vec2 z0{cfg.simulate.z0[0], cfg.simulate.z0[1]};

    OdeOptions opts;
    opts.tol = cfg.tolerances.ode_tol;
    opts.event_tol = cfg.tolerances.event_tol;
    const OrbitSegment orb =
        (eps == 0.0)
            ? integrate(field, z0, cfg.simulate.alpha, cfg.simulate.t_max, opts.tol, {},
                        false, opts)
            : integrate_auto(field, z0, std::nullopt, cfg.simulate.alpha,
                             cfg.simulate.t_max, opts.tol, eps, {}, false, opts);

    CsvTable table({"t", "x", "y"});
    const int n = cfg.simulate.n_out;
    double y_min_tail = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double t = orb.t_end * static_cast<double>(i) / (n - 1);
        const Vec2 z = orb.plane_at(t);
        table.cell(t).cell(z.x).cell(z.y);
        table.end_row();
        if (t >= 0.75 * orb.t_end) y_min_tail = std::min(y_min_tail, z.y);
    }
    table.write(ctx.out / "simulate.csv");

    json j;
    j["subcommand"] = "simulate";
    j["model"] = cfg.model.kind;
    j["eps"] = eps;
    j["alpha"] = cfg.simulate.alpha;
    j["t_end"] = orb.t_end;
    j["n_steps"] = orb.n_steps;
    j["n_implicit"] = orb.n_implicit;
    j["n_rhs"] = orb.n_rhs;
    j["y_min_tail"] = y_min_tail;  // min y over the final quarter of the run
    j["pass"] = true;
    write_summary(ctx, "simulate", j);
    return 0;
}

// ---------------------------------------------------------------------------
// qmap
// ---------------------------------------------------------------------------

int run_qmap(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    if (cfg.eps_list.empty()) throw ConfigError("qmap: eps_list must be non-empty");
    const PwsModel model = build_model(cfg);
    const RegFnDescriptor fn = build_regfn(cfg);
    const SectionPair sec = build_sections(cfg);

    double x_lo = cfg.qmap.x_lo, x_hi = cfg.qmap.x_hi;
    if (x_lo == 0.0 && x_hi == 0.0) {
        x_lo = sec.il_lo;
        x_hi = sec.il_hi;
    }
    const std::vector<double> grid = linspace(x_lo, x_hi, cfg.qmap.n);

    CsvTable table({"eps", "x", "ok", "x_out", "d1", "d2", "flight_time", "slid"});
    json per_eps = json::array();
    int n_fail = 0, n_d1_nonneg = 0;
    for (double eps : cfg.eps_list) {
        const std::vector<GridSample> samples =
            sweep_q_grid(model, fn, eps, sec, grid, cfg.qmap.alpha, cfg.qmap.want_d2,
                         ctx.jobs);
        json failures = json::array();
        int n_ok = 0;
        double min_d1 = std::numeric_limits<double>::infinity();
        double max_d1 = -min_d1;
        for (const GridSample& g : samples) {
            table.cell(eps).cell(g.x).cell(g.ok);
            if (g.ok) {
                table.cell(g.sample.x_out)
                    .cell(g.sample.d1)
                    .cell(g.sample.d2 ? *g.sample.d2 : 0.0)
                    .cell(g.sample.flight_time)
                    .cell(g.sample.slid);
                ++n_ok;
                min_d1 = std::min(min_d1, g.sample.d1);
                max_d1 = std::max(max_d1, g.sample.d1);
                if (g.sample.d1 >= 0.0) ++n_d1_nonneg;
            } else {
                table.cell(0.0).cell(0.0).cell(0.0).cell(0.0).cell(false);
                failures.push_back({{"x", g.x}, {"error", g.error}});
                ++n_fail;
            }
            table.end_row();
        }
        per_eps.push_back({{"eps", eps},
                           {"n_ok", n_ok},
                           {"min_d1", min_d1},
                           {"max_d1", max_d1},
                           {"failures", failures}});
    }
    table.write(ctx.out / "qmap.csv");

    const bool pass = (n_fail == 0) && (n_d1_nonneg == 0);
    json j;
    j["subcommand"] = "qmap";
    j["alpha"] = cfg.qmap.alpha;
    j["x_lo"] = x_lo;
    j["x_hi"] = x_hi;
    j["per_eps"] = per_eps;
    j["n_fail"] = n_fail;
    j["n_d1_nonneg"] = n_d1_nonneg;  // monotone-decrease invariant violations
    j["pass"] = pass;
    write_summary(ctx, "qmap", j);
    return pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// regions
// ---------------------------------------------------------------------------

void region_rows(CsvTable& table, double eps, int region,
                 const std::vector<GridSample>& samples) {
    for (const GridSample& g : samples) {
        table.cell(eps).cell(region).cell(g.x).cell(g.ok);
        if (g.ok) {
            table.cell(g.sample.x_out).cell(g.sample.d1).cell(
                g.sample.d2 ? *g.sample.d2 : 0.0);
        } else {
            table.cell(0.0).cell(0.0).cell(0.0);
        }
        table.end_row();
    }
}

int run_regions(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    if (cfg.model.kind != "normal_form") {
        throw ConfigError("regions: needs model.kind = 'normal_form' (local geometry)");
    }
    if (cfg.eps_list.empty()) throw ConfigError("regions: eps_list must be non-empty");
    const PwsModel model = build_model(cfg);
    const RegFnDescriptor fn = build_regfn(cfg);
    const SectionPair sec = build_sections(cfg);

    const std::vector<RegionStats> report =
        q_region_report(model, fn, cfg.eps_list, sec, cfg.regions.chi, cfg.regions.theta,
                        cfg.regions.n_per_region, ctx.jobs);

    CsvTable table({"eps", "region", "x", "ok", "x_out", "d1", "d2"});
    json per_eps = json::array();
    std::vector<double> inv_eps, log_q1;
    int n_violations = 0;
    for (const RegionStats& r : report) {
        region_rows(table, r.eps, 1, r.samples_i);
        region_rows(table, r.eps, 2, r.samples_ii);
        region_rows(table, r.eps, 3, r.samples_iii);

        const bool ii_ok = (r.n_ok_ii == static_cast<int>(r.samples_ii.size())) &&
                           (r.n_d1_neg == r.n_ok_ii) && (r.n_d2_neg == r.n_ok_ii) &&
                           r.unique_half_crossing;
        if (!ii_ok) ++n_violations;
        if (r.max_abs_d1_i > 0.0) {
            inv_eps.push_back(1.0 / r.eps);
            log_q1.push_back(std::log(r.max_abs_d1_i));
        }
        per_eps.push_back({{"eps", r.eps},
                           {"p_exp", r.p_exp},
                           {"window_i", {r.i_lo, r.i_hi}},
                           {"window_ii", {r.ii_lo, r.ii_hi}},
                           {"window_iii", {r.iii_lo, r.iii_hi}},
                           {"iii_valid", r.iii_valid},
                           {"max_abs_d1_i", r.max_abs_d1_i},
                           {"n_ok_ii", r.n_ok_ii},
                           {"n_d1_neg", r.n_d1_neg},
                           {"n_d2_neg", r.n_d2_neg},
                           {"unique_half_crossing", r.unique_half_crossing},
                           {"x_half_crossing", r.x_half_crossing},
                           {"max_dev_iii", r.max_dev_iii},
                           {"region_ii_ok", ii_ok}});
    }
    table.write(ctx.out / "regions.csv");

    json j;
    j["subcommand"] = "regions";
    j["chi"] = cfg.regions.chi;
    j["theta"] = cfg.regions.theta;
    j["per_eps"] = per_eps;
    bool slope_ok = true;
    if (inv_eps.size() >= 2) {
        const LineFit lf = fit_line(inv_eps, log_q1);
        j["region_i_slope"] = lf.slope;  // log|Q'| vs 1/eps, must be negative
        slope_ok = lf.slope < 0.0;
    }
    const bool pass = (n_violations == 0) && slope_ok;
    j["n_region_ii_violations"] = n_violations;
    j["pass"] = pass;
    write_summary(ctx, "regions", j);
    return pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// chini
// ---------------------------------------------------------------------------

int run_chini(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    CsvTable table({"k", "c", "u0", "T", "U", "U1", "U2", "v1_T", "w_T"});
    json per_case = json::array();
    bool pass = true;
    for (int k : cfg.chini.k_list) {
        for (double c : cfg.chini.c_list) {
            const std::vector<double> grid =
                chini_default_grid(k, c, cfg.chini.n_grid, cfg.chini.u_lo);
            const ChiniScanReport rep = chini_property_scan(k, c, grid);
            for (const ChiniScanRow& r : rep.rows) {
                table.cell(k).cell(c).cell(r.u0).cell(r.T).cell(r.U).cell(r.U1).cell(
                    r.U2);
                table.cell(r.v1_T).cell(r.w_T);
                table.end_row();
            }
            pass = pass && rep.all_pass;
            per_case.push_back({{"k", k},
                                {"c", c},
                                {"n_grid", rep.rows.size()},
                                {"all_pass", rep.all_pass},
                                {"min_u1_gap_low", rep.min_u1_gap_low},
                                {"min_u1_gap_high", rep.min_u1_gap_high},
                                {"min_neg_u2", rep.min_neg_u2},
                                {"min_v1", rep.min_v1},
                                {"min_w", rep.min_w},
                                {"violations", rep.violations}});
        }
    }
    table.write(ctx.out / "chini.csv");

    json j;
    j["subcommand"] = "chini";
    j["per_case"] = per_case;
    j["pass"] = pass;
    write_summary(ctx, "chini", j);
    return pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// charts
// ---------------------------------------------------------------------------

double coord_err(const ChartPoint& a, const ChartPoint& b) {
    double e = 0.0;
    for (int i = 0; i < 3; ++i) {
        e = std::max(e, std::abs(a.coords[i] - b.coords[i]) /
                            std::max(1.0, std::abs(a.coords[i])));
    }
    return e;
}

int run_charts(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    std::mt19937 rng(static_cast<std::mt19937::result_type>(cfg.rng_seed));
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> ulog_y(std::log(1e-3), std::log(1.0));
    std::uniform_real_distribution<double> ulog_e(std::log(1e-6), std::log(1e-2));
    std::uniform_real_distribution<double> ulam(0.5, 2.0);

    CsvTable table({"k", "case", "err_cyl12", "err_cyl32", "err_sph_cart", "err_sph12",
                    "err_conservation", "err_scale"});
    double worst = 0.0;
    for (int k : cfg.charts.k_list) {
        for (int i = 0; i < cfg.charts.n_cases; ++i) {
            const double x = ux(rng);
            const double y = std::exp(ulog_y(rng));
            const double eps = std::exp(ulog_e(rng));
            const double lam = ulam(rng);

            // Cylinder round trips through the overlap with chart 2.
            const ChartPoint c1 = make_cyl(ChartId::cyl_y1, y, eps / y);
            const double e12 =
                coord_err(c1, cyl_chart_change(cyl_chart_change(c1, ChartId::cyl_eps2),
                                               ChartId::cyl_y1));
            const ChartPoint c3 = make_cyl(ChartId::cyl_ym3, y, eps / y);
            const double e32 =
                coord_err(c3, cyl_chart_change(cyl_chart_change(c3, ChartId::cyl_eps2),
                                               ChartId::cyl_ym3));

            // Sphere: Cartesian round trip, chart change round trip,
            // conservation, and the weighted scale equivariance.
            const ChartPoint s1 = sphere_from_cartesian(x, y, eps, k);
            const std::array<double, 3> back = sphere_to_cartesian(s1);
            double ec = std::abs(back[0] - x) / std::max(1.0, std::abs(x));
            ec = std::max(ec, std::abs(back[1] - y) / std::max(1.0, y));
            ec = std::max(ec, std::abs(back[2] - eps) / std::max(1.0, eps));
            const double e12s = coord_err(
                s1, sphere_chart_change(sphere_chart_change(s1, ChartId::sph_eps2),
                                        ChartId::sph_r1));
            const ChartPoint s2 = sphere_chart_change(s1, ChartId::sph_eps2);
            double econ = std::abs(sphere_conservation(s1) - eps) / eps;
            econ = std::max(econ, std::abs(sphere_conservation(s2) - eps) / eps);

            const ChartPoint s1s = sphere_from_cartesian(
                std::pow(lam, k) * x, std::pow(lam, 2 * k) * y,
                std::pow(lam, 2 * k + 1) * eps, k);
            double esc = std::abs(s1s.coords[0] - lam * s1.coords[0]) /
                         std::max(1.0, lam * s1.coords[0]);
            esc = std::max(esc, std::abs(s1s.coords[1] - s1.coords[1]) /
                                    std::max(1.0, std::abs(s1.coords[1])));
            esc = std::max(esc, std::abs(s1s.coords[2] - s1.coords[2]) /
                                    std::max(1.0, std::abs(s1.coords[2])));

            table.cell(k).cell(i).cell(e12).cell(e32).cell(ec).cell(e12s).cell(econ).cell(
                esc);
            table.end_row();
            worst = std::max({worst, e12, e32, ec, e12s, econ, esc});
        }
    }
    table.write(ctx.out / "charts.csv");

    const bool pass = worst <= 1e-13;
    json j;
    j["subcommand"] = "charts";
    j["n_cases"] = cfg.charts.n_cases;
    j["k_list"] = cfg.charts.k_list;
    j["rng_seed"] = cfg.rng_seed;
    j["max_error"] = worst;
    j["bound"] = 1e-13;
    j["pass"] = pass;
    write_summary(ctx, "charts", j);
    return pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// branch
// ---------------------------------------------------------------------------

int run_branch(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    if (cfg.eps_list.empty()) throw ConfigError("branch: eps_list must be non-empty");
    const PwsModel model = build_model(cfg);
    const RegFnDescriptor fn = build_regfn(cfg);
    const SectionPair sec = build_sections(cfg);
    const SweepSettings settings = build_sweep_settings(cfg, ctx.jobs);

    double a_lo = cfg.alpha.lo, a_hi = cfg.alpha.hi;
    if (a_lo == 0.0 && a_hi == 0.0) {
        a_lo = settings.alpha_stable_probe;
        a_hi = settings.alpha_graze_seed1 + 0.02;
    }
    if (!(a_lo < a_hi)) throw ConfigError("branch: need alpha.lo < alpha.hi");

    struct EpsOutcome {
        bool ok = false;
        BranchResult br;
        std::string error;
    };
    std::vector<EpsOutcome> outcomes(cfg.eps_list.size());
    run_parallel(
        cfg.eps_list.size(),
        [&](std::size_t i) {
            EpsOutcome& o = outcomes[i];
            try {
                const BranchPoint seed = stable_cycle_from_simulation(
                    model, fn, cfg.eps_list[i], sec, a_lo, settings.sim_start,
                    settings.t_settle);
                o.br = trace_branch(model, fn, cfg.eps_list[i], sec, a_lo, a_hi, seed,
                                    settings.trace);
                o.ok = true;
            } catch (const std::exception& e) {
                o.error = e.what();
            }
        },
        ctx.jobs);

    CsvTable table({"eps", "idx", "alpha", "x_fix", "multiplier", "y_min", "flight_time",
                    "is_fold"});
    json per_eps = json::array();
    int n_fail = 0;
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
        const EpsOutcome& o = outcomes[i];
        if (!o.ok) {
            ++n_fail;
            per_eps.push_back({{"eps", cfg.eps_list[i]}, {"error", o.error}});
            continue;
        }
        json folds = json::array();
        for (std::size_t p = 0; p < o.br.points.size(); ++p) {
            const BranchPoint& b = o.br.points[p];
            const bool is_fold = std::find(o.br.fold_indices.begin(),
                                           o.br.fold_indices.end(),
                                           p) != o.br.fold_indices.end();
            table.cell(cfg.eps_list[i])
                .cell(p)
                .cell(b.alpha)
                .cell(b.x_fix)
                .cell(b.multiplier)
                .cell(b.y_min)
                .cell(b.flight_time)
                .cell(is_fold);
            table.end_row();
            if (is_fold) folds.push_back(b.alpha);
        }
        per_eps.push_back({{"eps", cfg.eps_list[i]},
                           {"n_points", o.br.points.size()},
                           {"fold_alphas", folds},
                           {"truncated", o.br.truncated},
                           {"truncation_reason", o.br.truncation_reason}});
    }
    table.write(ctx.out / "branch.csv");

    json j;
    j["subcommand"] = "branch";
    j["alpha_lo"] = a_lo;
    j["alpha_hi"] = a_hi;
    j["per_eps"] = per_eps;
    j["n_fail"] = n_fail;
    j["pass"] = n_fail == 0;
    write_summary(ctx, "branch", j);
    return n_fail == 0 ? 0 : 3;
}

// ---------------------------------------------------------------------------
// fold-sweep / scaling (one fan-out, two table views)
// ---------------------------------------------------------------------------

struct EpsFold {
    double eps = 0.0;
    bool ok = false;
    FoldPoint fp;
    double hausdorff = 0.0;
    double gap = 0.0;
    std::string error;
};

struct SweepOutcome {
    GrazingResult gz;
    std::vector<EpsFold> folds;
};

std::string job_name(const std::string& prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%03zu.csv", prefix.c_str(), i);
    return buf;
}

// Fan out one fold search per eps; each job writes its own row file, the
// caller merges them single-threaded.
SweepOutcome run_scaling_jobs(const RunContext& ctx, const std::string& prefix) {
    const ExperimentConfig& cfg = ctx.cfg;
    if (cfg.eps_list.empty()) throw ConfigError(prefix + ": eps_list must be non-empty");
    const PwsModel model = build_model(cfg);
    const RegFnDescriptor fn = build_regfn(cfg);
    const SectionPair sec = build_sections(cfg);
    const SweepSettings settings = build_sweep_settings(cfg, ctx.jobs);

    SweepOutcome out;
    out.gz = grazing_alpha(model, sec, settings.alpha_graze_seed0,
                           settings.alpha_graze_seed1, settings.sim_start);
    out.folds.resize(cfg.eps_list.size());
    const fs::path job_dir = ctx.out / "jobs";
    run_parallel(
        cfg.eps_list.size(),
        [&](std::size_t i) {
            EpsFold& ef = out.folds[i];
            ef.eps = cfg.eps_list[i];
            CsvTable row({"eps", "ok", "alpha_sn", "x_sn", "d2xx", "dp_dalpha", "gap",
                          "hausdorff"});
            try {
                ef.fp = find_fold_for_eps(model, fn, ef.eps, sec, settings,
                                          out.gz.alpha_star);
                ef.gap = out.gz.alpha_star - ef.fp.alpha_sn;
                if (!(ef.gap > 0.0)) {
                    throw ConvergenceError("non-positive gap alpha_star - alpha_sn = " +
                                           g17(ef.gap));
                }
                // Serial Hausdorff inside the worker: the eps fan-out is the
                // parallel layer here.
                ef.hausdorff = hausdorff_distance(ef.fp.orbit, out.gz.gamma0);
                ef.ok = true;
                row.cell(ef.eps)
                    .cell(true)
                    .cell(ef.fp.alpha_sn)
                    .cell(ef.fp.x_sn)
                    .cell(ef.fp.d2xx)
                    .cell(ef.fp.dp_dalpha)
                    .cell(ef.gap)
                    .cell(ef.hausdorff);
            } catch (const std::exception& e) {
                ef.error = e.what();
                row.cell(ef.eps).cell(false).cell(0.0).cell(0.0).cell(0.0).cell(0.0).cell(
                    0.0).cell(0.0);
            }
            row.end_row();
            row.write(job_dir / job_name(prefix, i));
        },
        ctx.jobs);
    return out;
}

json fit_json(const SweepOutcome& out) {
    std::vector<double> lx, ly;
    json per_eps = json::array();
    for (const EpsFold& ef : out.folds) {
        json e = {{"eps", ef.eps}, {"ok", ef.ok}};
        if (ef.ok) {
            e["alpha_sn"] = ef.fp.alpha_sn;
            e["gap"] = ef.gap;
            e["hausdorff"] = ef.hausdorff;
            lx.push_back(std::log(ef.eps));
            ly.push_back(std::log(ef.gap));
        } else {
            e["error"] = ef.error;
        }
        per_eps.push_back(e);
    }
    json j;
    j["alpha_star"] = out.gz.alpha_star;
    j["per_eps"] = per_eps;
    j["n_ok"] = lx.size();
    if (lx.size() >= 2) {
        const LineFit lf = fit_line(lx, ly);
        j["slope"] = lf.slope;
        j["intercept"] = lf.intercept;
        j["r_squared"] = lf.r_squared;
    }
    return j;
}

void write_polyline(const fs::path& path, const Polyline& poly) {
    CsvTable t({"x", "y"});
    for (const Vec2& p : poly) {
        t.cell(p.x).cell(p.y);
        t.end_row();
    }
    t.write(path);
}

int run_fold_sweep(const RunContext& ctx) {
    const SweepOutcome out = run_scaling_jobs(ctx, "fold");

    // Single-threaded merge of the per-job row files.
    std::string merged;
    for (std::size_t i = 0; i < out.folds.size(); ++i) {
        const std::string text =
            read_text_file(ctx.out / "jobs" / job_name("fold", i));
        if (i == 0) {
            merged = text;
        } else {
            merged += text.substr(text.find('\n') + 1);  // drop the header
        }
    }
    write_text_file(ctx.out / "folds.csv", merged);
    write_polyline(ctx.out / "grazing.csv", out.gz.gamma0);
    for (std::size_t i = 0; i < out.folds.size(); ++i) {
        if (out.folds[i].ok) {
            write_polyline(ctx.out / "jobs" / job_name("orbit", i), out.folds[i].fp.orbit);
        }
    }

    json j = fit_json(out);
    j["subcommand"] = "fold-sweep";
    const bool pass = static_cast<std::size_t>(j["n_ok"].get<int>()) == out.folds.size();
    j["pass"] = pass;
    write_summary(ctx, "fold_sweep", j);
    return pass ? 0 : 3;
}

int run_scaling(const RunContext& ctx) {
    const SweepOutcome out = run_scaling_jobs(ctx, "scaling");

    CsvTable table({"eps", "gap", "log_eps", "log_gap", "hausdorff"});
    for (const EpsFold& ef : out.folds) {
        if (!ef.ok) continue;
        table.cell(ef.eps)
            .cell(ef.gap)
            .cell(std::log(ef.eps))
            .cell(std::log(ef.gap))
            .cell(ef.hausdorff);
        table.end_row();
    }
    table.write(ctx.out / "scaling.csv");

    json j = fit_json(out);
    j["subcommand"] = "scaling";
    const bool pass = static_cast<std::size_t>(j["n_ok"].get<int>()) == out.folds.size();
    j["pass"] = pass;
    write_summary(ctx, "scaling", j);
    return pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

int dispatch(const std::string& name, const RunContext& ctx) {
    if (name == "simulate") return run_simulate(ctx);
    if (name == "qmap") return run_qmap(ctx);
    if (name == "regions") return run_regions(ctx);
    if (name == "chini") return run_chini(ctx);
    if (name == "charts") return run_charts(ctx);
    if (name == "branch") return run_branch(ctx);
    if (name == "fold-sweep") return run_fold_sweep(ctx);
    if (name == "scaling") return run_scaling(ctx);
    throw ConfigError("unknown subcommand " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"foldlab: regularized visible-fold experiments (deterministic CSV/JSON)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int jobs = 0;
    const std::vector<std::string> names = {"simulate", "qmap",   "regions",
                                            "chini",    "charts", "branch",
                                            "fold-sweep", "scaling"};
    const std::vector<std::string> descs = {
        "integrate one trajectory to CSV",
        "transition-map table over an x grid",
        "Q' statistics in the three blowup windows",
        "Chini section-map property scan",
        "blowup chart round-trip checks (seeded random grid)",
        "cycle branch continuation in alpha",
        "per-eps saddle-node folds + scaling fit",
        "scaling-law table and log-log fit"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "JSON experiment config")
            ->required();
        sub->add_option("--jobs", jobs, "worker threads (0 = OpenMP default)");
        sub->add_option("--out", out_override, "output directory (overrides config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::string sub_name;
    try {
        sub_name = app.get_subcommands().front()->get_name();
        RunContext ctx;
        ctx.cfg = load_config_file(config_path);
        ctx.out = out_override.empty() ? fs::path(ctx.cfg.out_dir)
                                       : fs::path(out_override);
        ctx.jobs = jobs;
        std::filesystem::create_directories(ctx.out);

        const int code = dispatch(sub_name, ctx);

        // Wall-clock timing goes to a log file, never into the data tables.
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string stem = sub_name;
        std::replace(stem.begin(), stem.end(), '-', '_');
        write_text_file(ctx.out / (stem + "_timing.log"),
                        sub_name + ": " + std::to_string(secs) + " s\n");

        if (code == 0) {
            std::cout << sub_name << ": pass\n";
        } else {
            std::cout << sub_name << ": invariant failures (see summary JSON)\n";
        }
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << sub_name << ": numeric failure: " << e.what() << "\n";
        return 2;
    }
}

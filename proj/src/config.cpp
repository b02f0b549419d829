#include "foldlab/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "foldlab/csvio.hpp"

namespace foldlab {

using nlohmann::json;

namespace {

// Reject keys outside the schema so typos fail loudly instead of silently
// running with defaults.
void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

template <typename T>
void get_to(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void get_pair(const json& j, const char* key, std::array<double, 2>& out,
              const std::string& where) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(where + "." + key + ": expected [lo, hi]");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
}

void parse_model(const json& j, ModelConfig& m) {
    check_keys(j, {"kind", "mu_s", "mu_m", "rho", "c"}, "model");
    get_to(j, "kind", m.kind, "model");
    if (m.kind != "normal_form" && m.kind != "friction") {
        throw ConfigError("model.kind: expected 'normal_form' or 'friction', got '" +
                          m.kind + "'");
    }
    get_to(j, "mu_s", m.friction.mu_s, "model");
    get_to(j, "mu_m", m.friction.mu_m, "model");
    get_to(j, "rho", m.friction.rho, "model");
    get_to(j, "c", m.friction.c_fric, "model");
}

void parse_sections(const json& j, SectionsConfig& s) {
    check_keys(j, {"delta", "xi", "il", "ir"}, "sections");
    get_to(j, "delta", s.delta, "sections");
    get_to(j, "xi", s.xi, "sections");
    std::array<double, 2> pair{};
    if (j.contains("il")) {
        get_pair(j, "il", pair, "sections");
        s.il = pair;
    }
    if (j.contains("ir")) {
        get_pair(j, "ir", pair, "sections");
        s.ir = pair;
    }
}

json pair_json(const std::array<double, 2>& p) { return json::array({p[0], p[1]}); }

}  // namespace

void ExperimentConfig::validate() const {
    if (tolerances.ode_tol < 1e-13 || tolerances.ode_tol > 1e-6) {
        throw ConfigError("tolerances.ode_tol out of [1e-13, 1e-6]: " +
                          g17(tolerances.ode_tol));
    }
    if (!(tolerances.event_tol > 0.0) || tolerances.event_tol > 1e-8) {
        throw ConfigError("tolerances.event_tol out of (0, 1e-8]: " +
                          g17(tolerances.event_tol));
    }
    for (double e : eps_list) {
        if (!(e > 0.0) || e > 0.1) {
            throw ConfigError("eps_list entries must lie in (0, 0.1]; got " + g17(e));
        }
    }
    if (model.kind == "friction") model.friction.validate();
    make_regfn(regfn);  // throws ConfigError on unknown names
    if (sections.delta < 0.0 || sections.xi < 0.0) {
        throw ConfigError("sections.delta / sections.xi must be >= 0 (0 = default)");
    }
    if (!(simulate.eps >= 0.0) || simulate.eps > 0.1) {
        throw ConfigError("simulate.eps must lie in [0, 0.1]");
    }
    if (!(simulate.t_max > 0.0)) throw ConfigError("simulate.t_max must be > 0");
    if (simulate.n_out < 2) throw ConfigError("simulate.n_out must be >= 2");
    if (qmap.n < 2) throw ConfigError("qmap.n must be >= 2");
    if (qmap.x_lo != 0.0 && !(qmap.x_lo < qmap.x_hi)) {
        throw ConfigError("qmap interval: need x_lo < x_hi");
    }
    if (!(regions.chi > 0.0) || !(regions.theta > 0.0)) {
        throw ConfigError("regions.chi and regions.theta must be > 0");
    }
    if (regions.n_per_region < 3) throw ConfigError("regions.n_per_region must be >= 3");
    if (chini.k_list.empty() || chini.c_list.empty()) {
        throw ConfigError("chini.k_list / chini.c_list must be non-empty");
    }
    for (int k : chini.k_list) {
        if (k < 1) throw ConfigError("chini.k_list entries must be >= 1");
    }
    for (double c : chini.c_list) {
        if (!(c > 0.0)) throw ConfigError("chini.c_list entries must be > 0");
    }
    if (chini.n_grid < 2) throw ConfigError("chini.n_grid must be >= 2");
    if (charts.n_cases < 1) throw ConfigError("charts.n_cases must be >= 1");
    for (int k : charts.k_list) {
        if (k < 1) throw ConfigError("charts.k_list entries must be >= 1");
    }
    if (!(sweep.ds_min > 0.0) || !(sweep.ds_min <= sweep.ds0) ||
        !(sweep.ds0 <= sweep.ds_max)) {
        throw ConfigError("sweep step sizes: need 0 < ds_min <= ds0 <= ds_max");
    }
    if (sweep.max_points < 3) throw ConfigError("sweep.max_points must be >= 3");
    if (!(sweep.t_settle > 0.0)) throw ConfigError("sweep.t_settle must be > 0");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    check_keys(j,
               {"model", "regfn", "eps_list", "sections", "alpha", "tolerances",
                "out_dir", "rng_seed", "simulate", "qmap", "regions", "chini", "charts",
                "sweep"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("model")) parse_model(j.at("model"), cfg.model);
    get_to(j, "regfn", cfg.regfn, "config");
    get_to(j, "eps_list", cfg.eps_list, "config");
    if (j.contains("sections")) parse_sections(j.at("sections"), cfg.sections);
    if (j.contains("alpha")) {
        const json& a = j.at("alpha");
        check_keys(a, {"lo", "hi"}, "alpha");
        get_to(a, "lo", cfg.alpha.lo, "alpha");
        get_to(a, "hi", cfg.alpha.hi, "alpha");
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, {"ode_tol", "event_tol"}, "tolerances");
        get_to(t, "ode_tol", cfg.tolerances.ode_tol, "tolerances");
        get_to(t, "event_tol", cfg.tolerances.event_tol, "tolerances");
    }
    get_to(j, "out_dir", cfg.out_dir, "config");
    get_to(j, "rng_seed", cfg.rng_seed, "config");
    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        check_keys(s, {"eps", "alpha", "t_max", "z0", "n_out"}, "simulate");
        get_to(s, "eps", cfg.simulate.eps, "simulate");
        get_to(s, "alpha", cfg.simulate.alpha, "simulate");
        get_to(s, "t_max", cfg.simulate.t_max, "simulate");
        get_pair(s, "z0", cfg.simulate.z0, "simulate");
        get_to(s, "n_out", cfg.simulate.n_out, "simulate");
    }
    if (j.contains("qmap")) {
        const json& q = j.at("qmap");
        check_keys(q, {"alpha", "x_lo", "x_hi", "n", "want_d2"}, "qmap");
        get_to(q, "alpha", cfg.qmap.alpha, "qmap");
        get_to(q, "x_lo", cfg.qmap.x_lo, "qmap");
        get_to(q, "x_hi", cfg.qmap.x_hi, "qmap");
        get_to(q, "n", cfg.qmap.n, "qmap");
        get_to(q, "want_d2", cfg.qmap.want_d2, "qmap");
    }
    if (j.contains("regions")) {
        const json& r = j.at("regions");
        check_keys(r, {"chi", "theta", "n_per_region"}, "regions");
        get_to(r, "chi", cfg.regions.chi, "regions");
        get_to(r, "theta", cfg.regions.theta, "regions");
        get_to(r, "n_per_region", cfg.regions.n_per_region, "regions");
    }
    if (j.contains("chini")) {
        const json& c = j.at("chini");
        check_keys(c, {"k_list", "c_list", "n_grid", "u_lo"}, "chini");
        get_to(c, "k_list", cfg.chini.k_list, "chini");
        get_to(c, "c_list", cfg.chini.c_list, "chini");
        get_to(c, "n_grid", cfg.chini.n_grid, "chini");
        get_to(c, "u_lo", cfg.chini.u_lo, "chini");
    }
    if (j.contains("charts")) {
        const json& c = j.at("charts");
        check_keys(c, {"n_cases", "k_list"}, "charts");
        get_to(c, "n_cases", cfg.charts.n_cases, "charts");
        get_to(c, "k_list", cfg.charts.k_list, "charts");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_keys(s,
                   {"alpha_graze_seed0", "alpha_graze_seed1", "alpha_stable_probe",
                    "sim_start", "t_settle", "ds0", "ds_min", "ds_max", "max_points"},
                   "sweep");
        get_to(s, "alpha_graze_seed0", cfg.sweep.alpha_graze_seed0, "sweep");
        get_to(s, "alpha_graze_seed1", cfg.sweep.alpha_graze_seed1, "sweep");
        get_to(s, "alpha_stable_probe", cfg.sweep.alpha_stable_probe, "sweep");
        get_pair(s, "sim_start", cfg.sweep.sim_start, "sweep");
        get_to(s, "t_settle", cfg.sweep.t_settle, "sweep");
        get_to(s, "ds0", cfg.sweep.ds0, "sweep");
        get_to(s, "ds_min", cfg.sweep.ds_min, "sweep");
        get_to(s, "ds_max", cfg.sweep.ds_max, "sweep");
        get_to(s, "max_points", cfg.sweep.max_points, "sweep");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["model"] = {{"kind", cfg.model.kind},
                  {"mu_s", cfg.model.friction.mu_s},
                  {"mu_m", cfg.model.friction.mu_m},
                  {"rho", cfg.model.friction.rho},
                  {"c", cfg.model.friction.c_fric}};
    j["regfn"] = cfg.regfn;
    j["eps_list"] = cfg.eps_list;
    json sec = {{"delta", cfg.sections.delta}, {"xi", cfg.sections.xi}};
    if (cfg.sections.il) sec["il"] = pair_json(*cfg.sections.il);
    if (cfg.sections.ir) sec["ir"] = pair_json(*cfg.sections.ir);
    j["sections"] = sec;
    j["alpha"] = {{"lo", cfg.alpha.lo}, {"hi", cfg.alpha.hi}};
    j["tolerances"] = {{"ode_tol", cfg.tolerances.ode_tol},
                       {"event_tol", cfg.tolerances.event_tol}};
    j["out_dir"] = cfg.out_dir;
    j["rng_seed"] = cfg.rng_seed;
    j["simulate"] = {{"eps", cfg.simulate.eps},
                     {"alpha", cfg.simulate.alpha},
                     {"t_max", cfg.simulate.t_max},
                     {"z0", pair_json(cfg.simulate.z0)},
                     {"n_out", cfg.simulate.n_out}};
    j["qmap"] = {{"alpha", cfg.qmap.alpha},
                 {"x_lo", cfg.qmap.x_lo},
                 {"x_hi", cfg.qmap.x_hi},
                 {"n", cfg.qmap.n},
                 {"want_d2", cfg.qmap.want_d2}};
    j["regions"] = {{"chi", cfg.regions.chi},
                    {"theta", cfg.regions.theta},
                    {"n_per_region", cfg.regions.n_per_region}};
    j["chini"] = {{"k_list", cfg.chini.k_list},
                  {"c_list", cfg.chini.c_list},
                  {"n_grid", cfg.chini.n_grid},
                  {"u_lo", cfg.chini.u_lo}};
    j["charts"] = {{"n_cases", cfg.charts.n_cases}, {"k_list", cfg.charts.k_list}};
    j["sweep"] = {{"alpha_graze_seed0", cfg.sweep.alpha_graze_seed0},
                  {"alpha_graze_seed1", cfg.sweep.alpha_graze_seed1},
                  {"alpha_stable_probe", cfg.sweep.alpha_stable_probe},
                  {"sim_start", pair_json(cfg.sweep.sim_start)},
                  {"t_settle", cfg.sweep.t_settle},
                  {"ds0", cfg.sweep.ds0},
                  {"ds_min", cfg.sweep.ds_min},
                  {"ds_max", cfg.sweep.ds_max},
                  {"max_points", cfg.sweep.max_points}};
    return j.dump(2) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

PwsModel build_model(const ExperimentConfig& cfg) {
    if (cfg.model.kind == "normal_form") return make_normal_form();
    return make_friction(cfg.model.friction);
}

RegFnDescriptor build_regfn(const ExperimentConfig& cfg) { return make_regfn(cfg.regfn); }

SectionPair build_sections(const ExperimentConfig& cfg) {
    SectionPair sec;
    if (cfg.model.kind == "normal_form") {
        sec = SectionPair::normal_form(cfg.sections.delta > 0.0 ? cfg.sections.delta
                                                                : 0.04,
                                       cfg.sections.xi > 0.0 ? cfg.sections.xi : 1.5);
    } else {
        sec = SectionPair::friction(cfg.sections.delta > 0.0 ? cfg.sections.delta
                                                             : 0.15);
        if (cfg.sections.xi > 0.0) sec.xi = cfg.sections.xi;
    }
    if (cfg.sections.il) {
        sec.il_lo = (*cfg.sections.il)[0];
        sec.il_hi = (*cfg.sections.il)[1];
    }
    if (cfg.sections.ir) {
        sec.ir_lo = (*cfg.sections.ir)[0];
        sec.ir_hi = (*cfg.sections.ir)[1];
    }
    sec.validate();
    return sec;
}

SweepSettings build_sweep_settings(const ExperimentConfig& cfg, int jobs) {
    if (cfg.model.kind != "friction") {
        throw ConfigError("continuation sweeps need model.kind = 'friction' "
                          "(the normal form has no global return map)");
    }
    const FrictionProps props = friction_props(cfg.model.friction);
    SweepSettings s;
    s.alpha_graze_seed0 = cfg.sweep.alpha_graze_seed0 != 0.0
                              ? cfg.sweep.alpha_graze_seed0
                              : props.y0 + 0.02;
    s.alpha_graze_seed1 = cfg.sweep.alpha_graze_seed1 != 0.0
                              ? cfg.sweep.alpha_graze_seed1
                              : props.y0 + 0.04;
    s.alpha_stable_probe = cfg.sweep.alpha_stable_probe != 0.0
                               ? cfg.sweep.alpha_stable_probe
                               : props.y0 - 0.01;
    if (cfg.sweep.sim_start[0] != 0.0 || cfg.sweep.sim_start[1] != 0.0) {
        s.sim_start = {cfg.sweep.sim_start[0], cfg.sweep.sim_start[1]};
    } else {
        // Just inside the repelling Z+ cycle at the grazing seed (its radius
        // ~ 1.3 sqrt(alpha - y0) dwarfs the 0.01 offset), and in the basin of
        // the attracting cycle at the stable probe (global there).
        const double a0 = s.alpha_graze_seed0;
        s.sim_start = {-friction_mu_plus(cfg.model.friction, a0) + 0.01, a0 + 0.01};
    }
    s.t_settle = cfg.sweep.t_settle;
    s.trace.ds0 = cfg.sweep.ds0;
    s.trace.ds_min = cfg.sweep.ds_min;
    s.trace.ds_max = cfg.sweep.ds_max;
    s.trace.max_points = cfg.sweep.max_points;
    s.jobs = jobs;
    return s;
}

}  // namespace foldlab

#pragma once

// JSON experiment configuration: strict schema (unknown keys rejected at
// every level), defaulted fields, documented tolerance ranges, and an exact
// parse -> serialize -> parse round trip.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "foldlab/continuation.hpp"
#include "foldlab/maps.hpp"
#include "foldlab/models.hpp"
#include "foldlab/regfn.hpp"

namespace foldlab {

/// Which piecewise-smooth model to build.  The normal form always uses
/// f = g = 0 through the config path; its perturbations are code-level hooks.
struct ModelConfig {
    std::string kind = "friction";  // "normal_form" | "friction"
    FrictionParams friction;        // read only when kind == "friction"
};

/// Section geometry overrides; zeros fall back to the model defaults
/// (normal form: delta = 0.04, xi = 1.5; friction: delta = 0.15).
struct SectionsConfig {
    double delta = 0.0;
    double xi = 0.0;
    std::optional<std::array<double, 2>> il;  // sampling interval x < 0
    std::optional<std::array<double, 2>> ir;  // sampling interval x > 0
};

struct AlphaWindow {
    double lo = 0.0;
    double hi = 0.0;
};

struct TolerancesConfig {
    double ode_tol = 1e-10;    // local error tolerance, in [1e-13, 1e-6]
    double event_tol = 1e-12;  // event residual tolerance, in (0, 1e-8]
};

struct SimulateConfig {
    double eps = 5e-3;  // 0 = pure Z+ flow
    double alpha = 0.38;
    double t_max = 200.0;
    std::array<double, 2> z0{0.0, 0.3};
    int n_out = 2000;  // uniformly resampled output rows
};

struct QmapConfig {
    double alpha = 0.0;
    double x_lo = 0.0, x_hi = 0.0;  // 0/0 = the section's I_L
    int n = 60;
    bool want_d2 = true;
};

struct RegionsConfig {
    double chi = 12.0;     // region (ii)/(iii) window scale
    double theta = 0.006;  // region (i) window offset
    int n_per_region = 30;
};

struct ChiniGridConfig {
    std::vector<int> k_list{1, 2, 3};
    std::vector<double> c_list{1.0, 2.0};
    int n_grid = 200;
    double u_lo = -2.0;
};

struct ChartsConfig {
    int n_cases = 100;
    std::vector<int> k_list{1, 2, 3};
};

/// Continuation seeds; zeros auto-resolve from the friction closed forms
/// (graze seeds y0 + 0.02 / y0 + 0.04, stable probe y0 - 0.01, start near
/// the probe equilibrium).
struct SweepConfig {
    double alpha_graze_seed0 = 0.0;
    double alpha_graze_seed1 = 0.0;
    double alpha_stable_probe = 0.0;
    std::array<double, 2> sim_start{0.0, 0.0};
    double t_settle = 400.0;
    double ds0 = 1e-3, ds_min = 1e-5, ds_max = 1e-2;
    int max_points = 2000;
};

struct ExperimentConfig {
    ModelConfig model;
    std::string regfn = "smooth_sqrt";
    std::vector<double> eps_list;
    SectionsConfig sections;
    AlphaWindow alpha;
    TolerancesConfig tolerances;
    std::string out_dir = "out";
    unsigned long rng_seed = 42;  // random test grids only (charts subcommand)
    SimulateConfig simulate;
    QmapConfig qmap;
    RegionsConfig regions;
    ChiniGridConfig chini;
    ChartsConfig charts;
    SweepConfig sweep;

    void validate() const;  // ConfigError on out-of-range fields
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
inline bool operator!=(const ExperimentConfig& a, const ExperimentConfig& b) {
    return !(a == b);
}

/// Parse a JSON document (ConfigError on syntax errors, unknown keys, type
/// mismatches, or out-of-range values).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Serialize every field (a full document, independent of which keys the
/// source document spelled out).  parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// Builders from a validated config.
PwsModel build_model(const ExperimentConfig& cfg);
RegFnDescriptor build_regfn(const ExperimentConfig& cfg);
SectionPair build_sections(const ExperimentConfig& cfg);
SweepSettings build_sweep_settings(const ExperimentConfig& cfg, int jobs);

}  // namespace foldlab

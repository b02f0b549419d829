#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "foldlab/config.hpp"

using namespace foldlab;

namespace {

const char* kMinimal = R"({"model": {"kind": "friction"}})";

const char* kFull = R"({
  "model": {"kind": "friction", "mu_s": 1.0, "mu_m": 0.5, "rho": 4.0, "c": 0.85},
  "regfn": "goldbeter_koshland",
  "eps_list": [5e-3, 2.5e-3, 1e-3],
  "sections": {"delta": 0.12, "xi": 2.0, "il": [-0.4, -0.02], "ir": [0.02, 0.4]},
  "alpha": {"lo": 0.1, "hi": 0.3},
  "tolerances": {"ode_tol": 1e-11, "event_tol": 1e-12},
  "out_dir": "results",
  "rng_seed": 7,
  "simulate": {"eps": 1e-3, "alpha": 0.2, "t_max": 50.0, "z0": [-0.5, 0.25], "n_out": 500},
  "qmap": {"alpha": 0.0, "x_lo": -0.4, "x_hi": -0.05, "n": 24, "want_d2": false},
  "regions": {"chi": 10.0, "theta": 0.005, "n_per_region": 12},
  "chini": {"k_list": [1, 2], "c_list": [1.0], "n_grid": 120, "u_lo": -1.8},
  "charts": {"n_cases": 50, "k_list": [2]},
  "sweep": {"alpha_graze_seed0": 0.23, "alpha_graze_seed1": 0.25,
            "alpha_stable_probe": 0.2, "sim_start": [-1.0, 0.24],
            "t_settle": 300.0, "ds0": 1e-3, "ds_min": 1e-5, "ds_max": 5e-3,
            "max_points": 1000}
})";

}  // namespace

// =============================================================================
// Parsing and round trips
// =============================================================================

TEST_CASE("defaults fill a minimal document") {
    const ExperimentConfig cfg = parse_config(kMinimal);
    CHECK(cfg.model.kind == "friction");
    CHECK(cfg.regfn == "smooth_sqrt");
    CHECK(cfg.tolerances.ode_tol == 1e-10);
    CHECK(cfg.chini.n_grid == 200);
    CHECK(cfg.chini.u_lo == -2.0);
    CHECK(cfg.regions.chi == 12.0);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("parse -> serialize -> parse is the identity") {
    for (const char* doc : {kMinimal, kFull}) {
        const ExperimentConfig a = parse_config(doc);
        const std::string text = serialize_config(a);
        const ExperimentConfig b = parse_config(text);
        CHECK(a == b);
        // Serialization is deterministic.
        CHECK(serialize_config(b) == text);
    }
    // A changed field breaks equality (the comparison is not vacuous).
    ExperimentConfig c = parse_config(kFull);
    c.simulate.alpha += 1e-9;
    CHECK(c != parse_config(kFull));
}

TEST_CASE("full document reads every section") {
    const ExperimentConfig cfg = parse_config(kFull);
    CHECK(cfg.regfn == "goldbeter_koshland");
    REQUIRE(cfg.eps_list.size() == 3);
    CHECK(cfg.eps_list[1] == 2.5e-3);
    CHECK(cfg.sections.delta == 0.12);
    REQUIRE(cfg.sections.il.has_value());
    CHECK((*cfg.sections.il)[0] == -0.4);
    CHECK(cfg.alpha.lo == 0.1);
    CHECK(cfg.simulate.z0[0] == -0.5);
    CHECK(cfg.qmap.n == 24);
    CHECK_FALSE(cfg.qmap.want_d2);
    CHECK(cfg.chini.k_list == std::vector<int>{1, 2});
    CHECK(cfg.charts.n_cases == 50);
    CHECK(cfg.sweep.alpha_stable_probe == 0.2);
    CHECK(cfg.rng_seed == 7);
}

// =============================================================================
// Rejection paths
// =============================================================================

TEST_CASE("unknown keys are rejected at every nesting level") {
    CHECK_THROWS_AS(parse_config(R"({"modle": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"kind": "friction", "x": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"kind": "friction", "mus": 1.0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tolerances": {"ode_tol": 1e-10, "tol": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep": {"ds-0": 1e-3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"chini": {"klist": [1]}})"), ConfigError);
}

TEST_CASE("malformed documents and type mismatches") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"regfn": 7})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"eps_list": "many"})"), ConfigError);
}

TEST_CASE("range validation") {
    // ode_tol outside [1e-13, 1e-6]
    CHECK_THROWS_AS(parse_config(R"({"tolerances": {"ode_tol": 1e-3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tolerances": {"event_tol": 0.0}})"), ConfigError);
    // eps outside (0, 0.1]
    CHECK_THROWS_AS(parse_config(R"({"eps_list": [0.5]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"eps_list": [-1e-3]})"), ConfigError);
    // bad model kind / regfn name
    CHECK_THROWS_AS(parse_config(R"({"model": {"kind": "pendulum"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"regfn": "tanh"})"), ConfigError);
    // friction constraint c in (0, rho (mu_s - mu_m))
    CHECK_THROWS_AS(
        parse_config(
            R"({"model": {"kind": "friction", "mu_s": 1.0, "mu_m": 0.5, "rho": 4.0, "c": 3.0}})"),
        ConfigError);
}

// =============================================================================
// Builders
// =============================================================================

TEST_CASE("builders assemble the configured objects") {
    const ExperimentConfig cfg = parse_config(kFull);

    const RegFnDescriptor fn = build_regfn(cfg);
    CHECK(fn.id == RegFnId::goldbeter_koshland);

    const SectionPair sec = build_sections(cfg);
    CHECK(sec.delta == 0.12);
    CHECK(sec.xi == 2.0);
    CHECK(sec.il_lo == -0.4);
    CHECK(sec.ir_hi == 0.4);

    const PwsModel model = build_model(cfg);
    const Vec2 zp = model.z_plus.eval(0.0, 0.3, 0.2);
    CHECK(zp.x == doctest::Approx(0.1).epsilon(1e-15));  // y - alpha

    const SweepSettings sw = build_sweep_settings(cfg, 3);
    CHECK(sw.alpha_graze_seed0 == 0.23);
    CHECK(sw.alpha_stable_probe == 0.2);
    CHECK(sw.jobs == 3);
    CHECK(sw.trace.ds_max == 5e-3);
}

TEST_CASE("sweep seeds auto-resolve from the friction geometry") {
    const ExperimentConfig cfg = parse_config(kMinimal);
    const SweepSettings sw = build_sweep_settings(cfg, 1);
    const double y0 = friction_props(cfg.model.friction).y0;
    CHECK(sw.alpha_graze_seed0 == doctest::Approx(y0 + 0.02).epsilon(1e-12));
    CHECK(sw.alpha_graze_seed1 == doctest::Approx(y0 + 0.04).epsilon(1e-12));
    CHECK(sw.alpha_stable_probe == doctest::Approx(y0 - 0.01).epsilon(1e-12));
    // The simulation start sits just inside the grazing cycle interior.
    CHECK(sw.sim_start.y > y0);
}

TEST_CASE("normal-form configs cannot drive the friction-only sweep") {
    const ExperimentConfig cfg = parse_config(R"({"model": {"kind": "normal_form"}})");
    CHECK_NOTHROW(build_model(cfg));
    CHECK_THROWS_AS(build_sweep_settings(cfg, 1), ConfigError);
}

TEST_CASE("config files load through the same pipeline") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "foldlab_test_config";
    fs::create_directories(dir);
    const fs::path file = dir / "c.json";
    {
        std::FILE* f = std::fopen(file.string().c_str(), "wb");
        REQUIRE(f != nullptr);
        std::fputs(kMinimal, f);
        std::fclose(f);
    }
    const ExperimentConfig cfg = load_config_file(file);
    CHECK(cfg.model.kind == "friction");
    CHECK_THROWS_AS(load_config_file(dir / "missing.json"), ConfigError);
    fs::remove_all(dir);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "pbglaser/app.hpp"
#include "pbglaser/checks.hpp"
#include "pbglaser/config.hpp"
#include "pbglaser/errors.hpp"

using namespace pbglaser;
using nlohmann::json;

#ifndef PBGLASER_CONFIG_DIR
#define PBGLASER_CONFIG_DIR "configs"
#endif

TEST_CASE("config round trip is idempotent") {
    RunConfig c;
    c.mode = Mode::spectrum;
    c.params.kappa = 0.05;
    c.params.g = 20.0;
    c.params.drive = LaserDrive{1.0, -10.0};
    c.params.gap = {true, false, true};
    c.spectrum.panels = {{"below", -10.0, 1000.0}, {"above", 10.0, std::nullopt}};
    c.spectrum.tau_step = 0.01;
    c.spectrum.grid = OmegaGrid::zoom;
    c.solver.n_override = 60;
    c.output = {"out.csv", OutputFormat::json, true};
    c.threads = 3;
    const json a = config_to_json(c);
    const json b = config_to_json(config_from_json(a));
    CHECK(a == b);
    const auto back = config_from_json(a);
    CHECK(back.mode == Mode::spectrum);
    CHECK(std::get<LaserDrive>(back.params.drive).delta_a == -10.0);
    CHECK(back.spectrum.panels.size() == 2);
    CHECK_FALSE(back.spectrum.panels[1].horizon.has_value());
    CHECK(*back.solver.n_override == 60);
}

TEST_CASE("shipped configs load and validate") {
    for (const char* name : {"sweep.json", "low_pump.json", "spectrum.json", "dist.json", "validate.json"}) {
        CAPTURE(name);
        const auto c = load_config(std::string(PBGLASER_CONFIG_DIR) + "/" + name);
        CHECK_NOTHROW(c.validate());
        CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
    }
}

TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"mode": "sweep", "bogus": 1})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"params": {"kapa": 1}})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"mode": "nope"})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"params": {"kappa": -1}})")).validate(), DomainError);
    // a spectrum needs a laser drive
    CHECK_THROWS_AS(
        config_from_json(json::parse(R"({"mode": "spectrum", "params": {"drive": {"cos4phi": 0.5}}})")).validate(),
        DomainError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), DomainError);
}

TEST_CASE("real formatting round-trips exactly") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const auto s = format_real(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_real(0.25) == "0.25");
}

TEST_CASE("sweep output does not depend on the thread count") {
    SystemParams base;
    base.kappa = 1e-3;
    const auto pts = pump_sweep_grid(21, 0.0, 1.0, base);
    SolverSettings s;
    std::ostringstream one, three;
    write_sweep_csv(one, compute_sweep(pts, s, 1));
    write_sweep_csv(three, compute_sweep(pts, s, 3));
    CHECK(one.str() == three.str());
    CHECK(one.str().rfind("cos4phi,gamma_plus,gamma_minus,gamma0,g1,mean_n,q_mandel,N_used,residual,gap_config_label,status\n", 0) == 0);
}

TEST_CASE("failed points are recorded and the sweep carries on") {
    SystemParams base;
    base.kappa = 1e-3;
    const auto pts = pump_sweep_grid(5, 0.0, 1.0, base);
    SolverSettings s;
    s.n_override = 40;  // far too small once the laser is above threshold
    const auto recs = compute_sweep(pts, s, 2);
    REQUIRE(recs.size() == pts.size());
    CHECK(recs[0].ok());  // cos^4 phi = 0: vacuum
    std::size_t failed = 0;
    for (const auto& r : recs) failed += !r.ok();
    CHECK(failed > 0);
    CHECK(failed < recs.size());
    std::ostringstream out;
    write_sweep_csv(out, recs);
    CHECK(out.str().find(",failed\n") != std::string::npos);
}

TEST_CASE("undefined Q is an empty field") {
    SystemParams base;
    const auto pts = pump_sweep_grid(2, 0.0, 1.0, base);
    const auto recs = compute_sweep({pts[0]}, SolverSettings{}, 1);
    REQUIRE(recs[0].ok());
    CHECK_FALSE(recs[0].q_mandel.has_value());
    std::ostringstream out;
    write_sweep_csv(out, recs);
    std::string line = out.str().substr(out.str().find('\n') + 1);
    // mean_n is the 6th field, q_mandel the 7th
    std::size_t pos = 0;
    for (int k = 0; k < 6; ++k) pos = line.find(',', pos) + 1;
    CHECK(line[pos] == ',');
    const auto j = sweep_records_json(recs, false);
    CHECK(j[0]["q_mandel"].is_null());
}

TEST_CASE("truncation check fails for a too-small override and passes otherwise") {
    ValidationOptions o;
    o.solver.n_override = 50;
    CHECK_FALSE(check_truncation(o).passed());
    o.solver.n_override = 2000;
    CHECK(check_truncation(o).passed());
    o.solver.n_override.reset();
    CHECK(check_truncation(o).passed());
}

TEST_CASE("default correlation step resolves the fastest frequency") {
    DressedRates r;
    r.g1 = 2.0;
    const double dt = default_tau_step(r, 3.0, 0.5);
    CHECK(dt == doctest::Approx(2.0 * 3.141592653589793 / (16.0 * 8.0)));
}

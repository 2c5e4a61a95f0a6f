#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pbglaser/dressed.hpp"
#include "pbglaser/errors.hpp"

using namespace pbglaser;

namespace {

SystemParams pump(double cos4phi, GapFlags gap = {}, double g = 10.0) {
    SystemParams p;
    p.g = g;
    p.drive = PumpDrive{cos4phi};
    p.gap = gap;
    return p;
}

}  // namespace

TEST_CASE("mixing angle at resonance and at +-10 eps detuning") {
    auto r = mix_angle(1.0, 0.0);
    CHECK(r.cos2phi == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.omega2 == doctest::Approx(2.0).epsilon(1e-15));

    r = mix_angle(1.0, 10.0);
    CHECK(r.omega2 == doctest::Approx(std::sqrt(104.0)).epsilon(1e-15));
    CHECK(r.omega2 == doctest::Approx(10.19804).epsilon(1e-6));
    CHECK(r.cos2phi == doctest::Approx(0.99029).epsilon(1e-5));

    r = mix_angle(1.0, -10.0);
    CHECK(r.cos2phi == doctest::Approx(0.00971).epsilon(1e-3));
    CHECK(r.cos2phi + mix_angle(1.0, 10.0).cos2phi == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mixing angle rejects a vanishing drive") {
    CHECK_THROWS_AS(mix_angle(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(mix_angle(-1.0, 1.0), DomainError);
}

TEST_CASE("mixing angle stays in [0,1] and is monotone in the detuning") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> eps(1e-3, 50.0), det(-1e4, 1e4);
    for (int i = 0; i < 500; ++i) {
        const double e = eps(rng);
        const double d1 = det(rng), d2 = det(rng);
        const auto a = mix_angle(e, std::min(d1, d2));
        const auto b = mix_angle(e, std::max(d1, d2));
        CHECK(a.cos2phi >= 0.0);
        CHECK(b.cos2phi <= 1.0);
        CHECK(a.cos2phi <= b.cos2phi);
        // the complementary weight is computed as 1 - cos2phi
        DressedRates r;
        r.cos2phi = a.cos2phi;
        CHECK(r.cos2phi + r.sin2phi() == 1.0);
    }
    CHECK(mix_angle(1.0, 1e12).cos2phi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mix_angle(1.0, -1e12).cos2phi == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rates at phi = pi/4 with every channel open") {
    // cos^2 phi = 0.5  <=>  cos^4 phi = 0.25
    const auto r = dressed_rates(pump(0.25));
    CHECK(r.cos2phi == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.gamma0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.gamma_plus == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.gamma_minus == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.g1 == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_FALSE(r.omega2.has_value());
}

TEST_CASE("rates with the gap on the lasing transition") {
    const auto open = dressed_rates(pump(0.25));
    const auto gap = dressed_rates(pump(0.25, {true, false, true}));
    CHECK(gap.gamma_minus == 0.0);
    CHECK(gap.gamma0 == open.gamma0);
    CHECK(gap.gamma_plus == open.gamma_plus);
    CHECK(gap.g1 == open.g1);

    // cos^2 phi = 0.3: sin^2(2 phi) = 4 * 0.3 * 0.7
    const auto r = dressed_rates(pump(0.09, {true, false, true}));
    CHECK(r.gamma0 == doctest::Approx(0.84).epsilon(1e-14));
    CHECK(r.gamma_plus == doctest::Approx(0.09).epsilon(1e-14));
    CHECK(r.gamma_minus == 0.0);
    CHECK(r.g1 == doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("each gap flag zeroes exactly one rate and leaves the rest bit-identical") {
    for (double x : {0.0, 0.1, 0.25, 0.64, 1.0}) {
        const auto all = dressed_rates(pump(x));
        const auto no_l = dressed_rates(pump(x, {false, true, true}));
        const auto no_m = dressed_rates(pump(x, {true, false, true}));
        const auto no_p = dressed_rates(pump(x, {true, true, false}));
        CHECK(no_l.gamma0 == 0.0);
        CHECK(no_l.gamma_plus == all.gamma_plus);
        CHECK(no_l.gamma_minus == all.gamma_minus);
        CHECK(no_m.gamma_minus == 0.0);
        CHECK(no_m.gamma0 == all.gamma0);
        CHECK(no_m.gamma_plus == all.gamma_plus);
        CHECK(no_p.gamma_plus == 0.0);
        CHECK(no_p.gamma0 == all.gamma0);
        CHECK(no_p.gamma_minus == all.gamma_minus);
        for (const auto& r : {all, no_l, no_m, no_p}) {
            CHECK(r.gamma0 >= 0.0);
            CHECK(r.gamma_plus >= 0.0);
            CHECK(r.gamma_minus >= 0.0);
            CHECK(r.g1 >= 0.0);
            CHECK(r.g1 <= 10.0);
        }
    }
}

TEST_CASE("pump and loss rates cross at cos^4 phi = 0.25") {
    const auto r = dressed_rates(pump(0.25));
    CHECK(r.gamma_plus == r.gamma_minus);
    CHECK(dressed_rates(pump(0.2)).gamma_plus < dressed_rates(pump(0.2)).gamma_minus);
    CHECK(dressed_rates(pump(0.3)).gamma_plus > dressed_rates(pump(0.3)).gamma_minus);
}

TEST_CASE("laser drive gives the mixing angle and Rabi frequency") {
    SystemParams p;
    p.drive = LaserDrive{1.0, 10.0};
    p.g = 20.0;
    const auto r = dressed_rates(p);
    REQUIRE(r.omega2.has_value());
    CHECK(*r.omega2 == doctest::Approx(std::sqrt(104.0)));
    CHECK(r.g1 == doctest::Approx(20.0 * (1.0 - r.cos2phi)).epsilon(1e-15));
    // rates scale linearly with gamma
    p.gamma = 2.0;
    const auto r2 = dressed_rates(p);
    CHECK(r2.gamma0 == doctest::Approx(2.0 * r.gamma0).epsilon(1e-15));
    CHECK(r2.gamma_plus == doctest::Approx(2.0 * r.gamma_plus).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    SystemParams p;
    p.kappa = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = SystemParams{};
    p.gamma = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = SystemParams{};
    p.g = -0.1;
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_THROWS_AS(pump(1.2).validate(), DomainError);
    CHECK_THROWS_AS(pump(-0.1).validate(), DomainError);
    CHECK_THROWS_AS(dressed_rates(pump(1.5)), DomainError);
    CHECK_NOTHROW(pump(1.0).validate());
}

TEST_CASE("pump sweep grid") {
    const auto base = pump(0.5);
    auto g = pump_sweep_grid(3, 0.0, 1.0, base);
    REQUIRE(g.size() == 6);
    const double want[] = {0.0, 0.5, 1.0};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::get<PumpDrive>(g[2 * i].drive).cos4phi == want[i]);
        CHECK(std::get<PumpDrive>(g[2 * i + 1].drive).cos4phi == want[i]);
        CHECK(g[2 * i].gap.u_minus);
        CHECK_FALSE(g[2 * i + 1].gap.u_minus);
    }

    g = pump_sweep_grid(101, 0.0, 1.0, base);
    REQUIRE(g.size() == 202);
    bool has_threshold = false;
    for (const auto& p : g) has_threshold = has_threshold || std::get<PumpDrive>(p.drive).cos4phi == 0.25;
    CHECK(has_threshold);
    CHECK(std::get<PumpDrive>(g.back().drive).cos4phi == 1.0);

    CHECK_THROWS_AS(pump_sweep_grid(1, 0.0, 1.0, base), DomainError);
    CHECK_THROWS_AS(pump_sweep_grid(5, 0.6, 0.4, base), DomainError);
    CHECK_THROWS_AS(pump_sweep_grid(5, 0.5, 0.5, base), DomainError);
    CHECK_THROWS_AS(pump_sweep_grid(5, 0.0, 1.5, base), DomainError);
}

TEST_CASE("gap labels") {
    CHECK(gap_label({}) == "no_gap");
    CHECK(gap_label({true, false, true}) == "gap");
    CHECK(gap_label({false, false, true}) == "gap_noL");
}

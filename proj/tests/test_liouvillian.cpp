#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pbglaser/errors.hpp"
#include "pbglaser/ladder.hpp"
#include "pbglaser/liouvillian.hpp"

using namespace pbglaser;

namespace {

DressedRates rates_for(double cos4phi, bool emission, double g = 1.0) {
    SystemParams p;
    p.g = g;
    p.drive = PumpDrive{cos4phi};
    p.gap.u_minus = emission;
    return dressed_rates(p);
}

DensityMatrix random_density(std::size_t dim, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd b(dim, dim);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = {nd(rng), nd(rng)};
    DensityMatrix rho = b * b.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST_CASE("zero rates and coupling give the zero map") {
    DressedRates r;
    r.cos2phi = 0.5;
    const Liouvillian l(r, 0.0, 5);
    CHECK(l.matrix().nonZeros() == 0);
}

TEST_CASE("the generator annihilates the trace") {
    std::mt19937 rng(1);
    const Liouvillian l(rates_for(0.6, true, 0.7), 0.2, 8);
    for (int i = 0; i < 100; ++i) {
        const auto rho = random_density(l.space().dim(), rng);
        const auto d = l.apply(rho);
        CHECK(std::abs(d.trace()) <= 1e-12);
        CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("without coupling the atom relaxes to gamma_+ : gamma_- and the cavity to vacuum") {
    auto r = rates_for(0.5, true);
    r.g1 = 0.0;
    const Liouvillian l(r, 0.3, 6);
    const auto rho = steady_state_density(l);
    const auto pops = dressed_populations(rho, l.space());
    // d p1/dt = gamma_- p2 - gamma_+ p1 with R12 = |1~><2~| at gamma_+... checked as a ratio
    CHECK(pops.p1 + pops.p2 == doctest::Approx(1.0).epsilon(1e-12));
    const double ratio = std::max(pops.p1, pops.p2) / std::min(pops.p1, pops.p2);
    const double want = std::max(r.gamma_plus, r.gamma_minus) / std::min(r.gamma_plus, r.gamma_minus);
    CHECK(ratio == doctest::Approx(want).epsilon(1e-9));
    const auto p = photon_distribution(rho, l.space());
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("without pump the cavity stays empty") {
    const auto r = rates_for(0.0, true);
    REQUIRE(r.gamma_plus == 0.0);
    const Liouvillian l(r, 0.1, 10);
    const auto rho = steady_state_density(l);
    const auto p = photon_distribution(rho, l.space());
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-10));
    const auto pops = dressed_populations(rho, l.space());
    CHECK(pops.p2 == doctest::Approx(1.0).epsilon(1e-10));
    const auto c = correlation(l, rho, uniform_tau_grid(0.5, 10.0));
    for (const auto& v : c.g) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("pumping favors the upper lasing state") {
    auto r = rates_for(0.8, false);
    r.g1 = 0.0;
    const Liouvillian l(r, 0.3, 4);
    const auto pops = dressed_populations(steady_state_density(l), l.space());
    CHECK(pops.p1 > pops.p2);
}

TEST_CASE("diagonal of the full master equation equals the ladder") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> ux(0.0, 1.0), uk(0.05, 1.0), ug(0.0, 3.0);
    std::bernoulli_distribution flag(0.5);
    for (int i = 0; i < 5; ++i) {
        SystemParams p;
        p.kappa = uk(rng);
        p.g = ug(rng);
        p.drive = PumpDrive{ux(rng)};
        p.gap = {flag(rng), flag(rng), true};
        const auto r = dressed_rates(p);
        const std::size_t N = 40;
        LadderOptions lo;
        lo.check_tail = false;
        const auto ladder = steady_state(r, p.kappa, N, lo);
        const Liouvillian l(r, p.kappa, N);
        const auto rho = steady_state_density(l);
        const auto pn = photon_distribution(rho, l.space());
        const auto& s = l.space();
        for (std::size_t n = 0; n <= N; ++n) {
            CHECK(std::abs(pn[n] - ladder.p1[n]) <= 1e-8);
            const double diff = rho(s.index(1, n), s.index(1, n)).real() - rho(s.index(0, n), s.index(0, n)).real();
            CHECK(std::abs(diff - ladder.p2[n]) <= 1e-8);
        }
        const auto d = diagnose(rho, &l);
        CHECK(d.min_eigenvalue >= -1e-10);
        CHECK(d.trace_error <= 1e-12);
        CHECK(d.hermiticity <= 1e-10);
        const auto pops = dressed_populations(rho, s);
        CHECK(pops.p1 + pops.p2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sparse and dense steady states agree") {
    const Liouvillian l(rates_for(0.7, true, 0.8), 0.25, 9);
    REQUIRE(l.space().dim() * l.space().dim() <= 400);
    const auto a = steady_state_density(l);
    const auto b = steady_state_density_dense(l);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("a degenerate null space is detected") {
    DressedRates r;
    r.cos2phi = 0.5;
    const Liouvillian l(r, 0.2, 4);  // atom populations are both stationary
    CHECK_THROWS_AS(steady_state_density(l), DegenerateNullSpaceError);
}

TEST_CASE("construction limits") {
    const auto r = rates_for(0.5, true);
    CHECK_THROWS_AS(Liouvillian(r, 0.1, 1), DomainError);
    CHECK_THROWS_AS(Liouvillian(r, -0.1, 10), DomainError);
    LiouvillianOptions o;
    o.max_bytes = 1000;
    CHECK_THROWS_AS(Liouvillian(r, 0.1, 10, o), ResourceError);
}

TEST_CASE("propagation preserves trace and Hermiticity") {
    std::mt19937 rng(4);
    const Liouvillian l(rates_for(0.6, true, 1.2), 0.2, 10);
    const auto rho = random_density(l.space().dim(), rng);
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    const Eigen::VectorXcd w = l.propagate(v, 3.0);
    const auto dim = static_cast<Eigen::Index>(l.space().dim());
    const DensityMatrix out = Eigen::Map<const DensityMatrix>(w.data(), dim, dim);
    CHECK(std::abs(out.trace() - cplx(1.0)) <= 1e-10);
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("correlation at zero delay is the mean photon number and never grows") {
    const Liouvillian l(rates_for(0.5, false, 1.0), 0.1, 30);
    const auto rho = steady_state_density(l);
    const auto p = photon_distribution(rho, l.space());
    double mean = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) mean += n * p[n];
    const auto c = correlation(l, rho, uniform_tau_grid(0.1, 40.0));
    CHECK(std::abs(c.g[0] - cplx(mean)) <= 1e-10);
    for (const auto& v : c.g) CHECK(std::abs(v) <= c.g[0].real() * (1.0 + 1e-9));
}

TEST_CASE("a decaying exponential transforms into a Lorentzian of width kappa") {
    const double kappa = 0.05;
    const auto tau = uniform_tau_grid(0.05, 400.0);
    std::vector<cplx> g(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) g[i] = std::exp(-kappa * tau[i] / 2.0);
    const auto omega = uniform_grid(-0.5, 0.5, 4001);
    const auto s = spectrum(g, tau, omega);
    REQUIRE(s.fwhm.has_value());
    CHECK(std::abs(*s.fwhm / kappa - 1.0) <= 0.02);
    REQUIRE(s.peak_positions.size() == 1);
    CHECK(std::abs(s.peak_positions[0]) <= 1e-6);
}

TEST_CASE("two separated lines give two peaks and no global width") {
    const double kappa = 0.05, split = 1.0;
    const auto tau = uniform_tau_grid(0.05, 400.0);
    std::vector<cplx> g(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i)
        g[i] = std::exp(-kappa * tau[i] / 2.0) * std::cos(split * tau[i]);
    const auto s = spectrum(g, tau, uniform_grid(-2.0, 2.0, 8001));
    REQUIRE(s.peak_positions.size() == 2);
    CHECK(s.peak_positions[0] == doctest::Approx(-split).epsilon(1e-3));
    CHECK(s.peak_positions[1] == doctest::Approx(split).epsilon(1e-3));
    CHECK_FALSE(s.fwhm.has_value());
    for (const auto& pk : s.peaks) {
        REQUIRE(pk.fwhm.has_value());
        CHECK(*pk.fwhm == doctest::Approx(kappa).epsilon(0.02));
    }
}

TEST_CASE("an undecayed correlation is rejected unless allowed") {
    const auto tau = uniform_tau_grid(0.1, 10.0);
    std::vector<cplx> g(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) g[i] = std::exp(-0.01 * tau[i]);
    const auto omega = uniform_grid(-1.0, 1.0, 201);
    try {
        spectrum(g, tau, omega);
        FAIL("expected HorizonError");
    } catch (const HorizonError& e) {
        CHECK(e.ratio() == doctest::Approx(std::exp(-0.1)));
    }
    SpectrumOptions o;
    o.allow_undecayed = true;
    CHECK_NOTHROW(spectrum(g, tau, omega, o));
}

TEST_CASE("spectrum integral recovers g(0)") {
    const double kappa = 0.2;
    const auto tau = uniform_tau_grid(0.01, 120.0);
    std::vector<cplx> g(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) g[i] = 3.0 * std::exp(-kappa * tau[i] / 2.0);
    const auto s = spectrum(g, tau, uniform_grid(-60.0, 60.0, 60001));
    // Lorentzian tails beyond the window carry ~ (kappa / pi) / 60 of the weight
    CHECK(s.integral == doctest::Approx(3.0).epsilon(3e-3));
}

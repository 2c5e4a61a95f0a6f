#include "pbglaser/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pbglaser/app.hpp"
#include "pbglaser/errors.hpp"
#include "pbglaser/specfun.hpp"

namespace pbglaser {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Measurement measure(std::string name, double value, std::string relation, double tol) {
    Measurement m{std::move(name), value, tol, false, std::move(relation)};
    if (m.relation == "<=") m.passed = value <= tol;
    else if (m.relation == "<") m.passed = value < tol;
    else if (m.relation == ">=") m.passed = value >= tol;
    else if (m.relation == ">") m.passed = value > tol;
    else if (m.relation == "==") m.passed = value == tol;
    return m;
}

double rel_err(double value, double ref) { return std::abs(value - ref) / std::abs(ref); }

std::string fmt(double v) { return format_real(v); }

// Runs `body`, timing it and turning exceptions into a failed check.
template <class Body>
CheckResult guarded(std::string id, std::string title, Body&& body) {
    CheckResult c;
    c.id = std::move(id);
    c.title = std::move(title);
    const auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.error = e.what();
    }
    c.seconds = seconds_since(t0);
    return c;
}

SystemParams pump_params(double kappa, double g, double cos4phi, bool emission) {
    SystemParams p;
    p.gamma = 1.0;
    p.kappa = kappa;
    p.g = g;
    p.drive = PumpDrive{cos4phi};
    p.gap.u_minus = emission;
    return p;
}

// reference sweep: kappa/g = 1e-4, kappa/gamma = 1e-3.
constexpr double kSweepKappa = 1e-3;
constexpr double kSweepG = 10.0;

std::vector<SweepRecord> reference_sweep(const ValidationOptions& opts, bool emission) {
    std::vector<SystemParams> pts;
    for (const auto& p : pump_sweep_grid(opts.sweep_points, 0.0, 1.0, pump_params(kSweepKappa, kSweepG, 0.0, true)))
        if (p.gap.u_minus == emission) pts.push_back(p);
    SolverSettings solver;
    solver.tail_tol = opts.solver.tail_tol;
    return compute_sweep(pts, solver, opts.threads);
}

void require_ok(const std::vector<SweepRecord>& recs) {
    for (const auto& r : recs)
        if (!r.ok()) throw Error("sweep point cos4phi=" + fmt(r.cos4phi) + " failed: " + r.error);
}

// reference spectra: kappa = 0.05 gamma, g = 20 gamma, epsilon = gamma,
// full gap on the lasing transition.
struct SpectrumPair {
    PanelResult below;
    PanelResult above;
    double seconds_below = 0.0;
    double seconds_above = 0.0;
};

constexpr double kHorizonBelow = 1000.0;
constexpr double kHorizonAbove = 5000.0;

SystemParams spectrum_params(double delta_a) {
    SystemParams p;
    p.kappa = 0.05;
    p.g = 20.0;
    p.drive = LaserDrive{1.0, delta_a};
    p.gap = GapFlags{true, false, true};
    return p;
}

const SpectrumPair& spectrum_pair() {
    static const SpectrumPair cache = [] {
        SpectrumPair f;
        const double g1_max = std::max(dressed_rates(spectrum_params(-10.0)).g1, dressed_rates(spectrum_params(10.0)).g1);
        SpectrumSettings settings;
        SolverSettings solver;
        SpectrumPanel below{"below", -10.0, kHorizonBelow};
        SpectrumPanel above{"above", 10.0, kHorizonAbove};
        settings.grid = OmegaGrid::doublet;
        auto t0 = Clock::now();
        f.below = compute_panel(spectrum_params(-10.0), settings, below, solver, g1_max);
        f.seconds_below = seconds_since(t0);
        settings.grid = OmegaGrid::automatic;
        t0 = Clock::now();
        f.above = compute_panel(spectrum_params(10.0), settings, above, solver, g1_max);
        f.seconds_above = seconds_since(t0);
        return f;
    }();
    return cache;
}

}  // namespace

bool CheckResult::passed() const {
    if (!error.empty()) return false;
    return std::all_of(measurements.begin(), measurements.end(), [](const Measurement& m) { return m.passed; });
}

json CheckResult::to_json() const {
    json ms = json::array();
    for (const auto& m : measurements)
        ms.push_back({{"name", m.name},
                      {"value", m.value},
                      {"relation", m.relation},
                      {"tolerance", m.tolerance},
                      {"passed", m.passed}});
    json j = {{"id", id}, {"title", title}, {"passed", passed()}, {"measurements", ms}, {"notes", notes},
              {"seconds", seconds}};
    if (!error.empty()) j["error"] = error;
    return j;
}

CheckResult check_threshold_location(const ValidationOptions& opts) {
    return guarded("threshold_location", "no-gap threshold near cos^4 phi = 0.25; large-pump <n> law",
                   [&](CheckResult& c) {
        const auto t0 = Clock::now();
        const auto recs = reference_sweep(opts, true);
        const double runtime = seconds_since(t0);
        require_ok(recs);

        double worst = 0.0, worst_x = 0.0, n_max = 0.0, n_low = 0.0;
        // least-squares line <n> = a (gamma_+ - gamma_-) + b over the bulk of the lasing branch
        double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
        for (const auto& r : recs) {
            n_max = std::max(n_max, r.mean_n);
            if (r.cos4phi <= 0.15) n_low = std::max(n_low, r.mean_n);
            if (r.cos4phi >= 0.4) {
                const double law = (r.gamma_plus - r.gamma_minus) / (2.0 * kSweepKappa);
                const double e = rel_err(r.mean_n, law);
                if (e > 0.05) c.notes.push_back("cos4phi=" + fmt(r.cos4phi) + ": <n>=" + fmt(r.mean_n) +
                                                " vs " + fmt(law) + " (rel. error " + fmt(e) + ")");
                if (e > worst) {
                    worst = e;
                    worst_x = r.cos4phi;
                }
            }
            if (r.cos4phi >= 0.4 && r.cos4phi <= 0.9) {
                const double x = r.gamma_plus - r.gamma_minus;
                sx += x, sy += r.mean_n, sxx += x * x, sxy += x * r.mean_n, cnt += 1;
            }
        }
        const double a = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        const double b = (sy - a * sx) / cnt;
        const double d0 = -b / a;  // gamma_+ - gamma_- = 2 cos^2 phi - 1 at the onset
        const double c0 = 0.5 * (1.0 + d0);
        const double x_th = c0 * c0;
        c.notes.push_back("extrapolated onset at cos4phi = " + fmt(x_th));
        c.notes.push_back("largest deviation from the law at cos4phi = " + fmt(worst_x));

        c.measurements.push_back(measure("|onset - 0.25|", std::abs(x_th - 0.25), "<=", 0.025));
        c.measurements.push_back(measure("max <n>(cos4phi<=0.15) / max <n>", n_low / n_max, "<=", 0.01));
        c.measurements.push_back(measure("max rel. error vs (g+ - g-)/2k for cos4phi>=0.4", worst, "<=", 0.05));
        c.measurements.push_back(measure("sweep runtime [s]", runtime, "<=", 120.0));
    });
}

CheckResult check_thresholdless_linearity(const ValidationOptions& opts) {
    return guarded("thresholdless_linearity", "full gap: <n> linear in gamma_+ through the origin",
                   [&](CheckResult& c) {
        const auto recs = reference_sweep(opts, false);
        require_ok(recs);
        auto fit = [&](double x_hi) {
            double sgy = 0, sgg = 0, sy = 0, cnt = 0;
            for (const auto& r : recs) {
                if (r.cos4phi < 0.05 || r.cos4phi > x_hi) continue;
                sgy += r.gamma_plus * r.mean_n, sgg += r.gamma_plus * r.gamma_plus, sy += r.mean_n, cnt += 1;
            }
            const double slope = sgy / sgg;
            const double mean = sy / cnt;
            double ss_res = 0, ss_tot = 0;
            for (const auto& r : recs) {
                if (r.cos4phi < 0.05 || r.cos4phi > x_hi) continue;
                ss_res += std::pow(r.mean_n - slope * r.gamma_plus, 2);
                ss_tot += std::pow(r.mean_n - mean, 2);
            }
            return std::pair{slope, 1.0 - ss_res / ss_tot};
        };
        const auto [slope, r2] = fit(1.0);
        const auto [slope95, r2_95] = fit(0.95);
        for (const auto& r : recs)
            if (r.cos4phi >= 0.95)
                c.notes.push_back("cos4phi=" + fmt(r.cos4phi) + ": <n>=" + fmt(r.mean_n) + ", g1=" + fmt(r.g1));
        c.notes.push_back("restricted to cos4phi <= 0.95: R^2=" + fmt(r2_95) + ", 2 kappa slope=" +
                          fmt(2.0 * kSweepKappa * slope95));
        c.measurements.push_back(measure("R^2 over cos4phi in [0.05, 1]", r2, ">=", 0.999));
        c.measurements.push_back(measure("|2 kappa slope - 1|", std::abs(2.0 * kSweepKappa * slope - 1.0), "<=", 0.03));
    });
}

CheckResult check_statistics_signatures(const ValidationOptions& opts) {
    return guarded("statistics_signatures", "no-gap Q > 0 peaked at threshold; full-gap Q = kappa/gamma_+",
                   [&](CheckResult& c) {
        const auto no_gap = reference_sweep(opts, true);
        const auto gap = reference_sweep(opts, false);
        require_ok(no_gap);
        require_ok(gap);

        double q_min = std::numeric_limits<double>::infinity(), q_max = -q_min, x_at_max = 0.0, q_half = 0.0;
        for (const auto& r : no_gap) {
            if (!r.q_mandel) continue;
            q_min = std::min(q_min, *r.q_mandel);
            if (*r.q_mandel > q_max) {
                q_max = *r.q_mandel;
                x_at_max = r.cos4phi;
            }
            if (std::abs(r.cos4phi - 0.5) < 1e-12) q_half = *r.q_mandel;
        }
        double worst = 0.0, worst_x = 0.0, worst_defined = 0.0;
        int undefined = 0;
        for (const auto& r : gap) {
            if (r.cos4phi < 0.4) continue;
            const double law = (r.gamma_minus + kSweepKappa) / r.gamma_plus;
            const double e = r.q_mandel ? rel_err(*r.q_mandel, law) : std::numeric_limits<double>::infinity();
            if (r.q_mandel) worst_defined = std::max(worst_defined, e);
            else ++undefined;
            if (e > worst) {
                worst = e;
                worst_x = r.cos4phi;
            }
            if (std::abs(r.cos4phi - 0.5) < 1e-12 && r.q_mandel)
                c.notes.push_back("full gap at cos4phi=0.5: Q=" + fmt(*r.q_mandel) + " vs kappa/gamma_+=" + fmt(law));
        }
        c.notes.push_back("no-gap Q maximum " + fmt(q_max) + " at cos4phi=" + fmt(x_at_max));
        c.notes.push_back("full-gap worst point cos4phi=" + fmt(worst_x) + "; " + std::to_string(undefined) +
                          " point(s) with undefined Q; worst rel. error among defined Q " + fmt(worst_defined));
        const double step = 1.0 / static_cast<double>(opts.sweep_points - 1);
        c.measurements.push_back(measure("min no-gap Q", q_min, ">", 0.0));
        c.measurements.push_back(measure("cos4phi of no-gap Q maximum", x_at_max, "<=", 0.25 + step));
        c.measurements.push_back(measure("no-gap Q max / Q(cos4phi=0.5)", q_max / q_half, ">=", 10.0));
        c.measurements.push_back(measure("max rel. error of full-gap Q vs kappa/gamma_+ (cos4phi>=0.4)", worst,
                                         "<=", 0.10));
    });
}

CheckResult check_low_pump_regime(const ValidationOptions& opts) {
    return guarded("low_pump_regime", "full gap, kappa/gamma=0.2: <n> = 2a(1-2a), Q = -2a/3 for a <= 0.15",
                   [&](CheckResult& c) {
        constexpr double kappa = 0.2;
        constexpr double g = 2000.0;
        std::vector<SystemParams> pts;
        std::vector<double> alphas;
        for (int k = 1; k <= 15; ++k) {
            const double alpha = 0.01 * k;
            alphas.push_back(alpha);
            pts.push_back(pump_params(kappa, g, 2.0 * kappa * alpha, false));
        }
        const auto recs = compute_sweep(pts, opts.solver.n_override ? SolverSettings{} : opts.solver, opts.threads);
        require_ok(recs);
        double worst_n = 0.0, worst_q = 0.0, q_top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto law = low_pump_observables(alphas[i]);
            const double q = recs[i].q_mandel.value_or(std::numeric_limits<double>::quiet_NaN());
            worst_n = std::max(worst_n, rel_err(recs[i].mean_n, law.mean_n));
            worst_q = std::max(worst_q, rel_err(q, law.q));
            q_top = std::max(q_top, q);
            if (i == 0 || i == 4 || i == 9 || i == 14)
                c.notes.push_back("alpha=" + fmt(alphas[i]) + ": <n>=" + fmt(recs[i].mean_n) + " vs " +
                                  fmt(law.mean_n) + ", Q=" + fmt(q) + " vs " + fmt(law.q));
        }
        c.measurements.push_back(measure("max rel. error of <n>", worst_n, "<=", 0.10));
        c.measurements.push_back(measure("max rel. error of Q", worst_q, "<=", 0.10));
        c.measurements.push_back(measure("max Q", q_top, "<", 0.0));
    });
}

CheckResult check_analytic_distribution(const ValidationOptions& opts) {
    return guarded("analytic_distribution", "closed-form P_n vs numeric, total variation <= 1e-2",
                   [&](CheckResult& c) {
        struct Case {
            double kappa, g, cos4phi;
            bool emission;
        };
        const Case cases[] = {{1e-4, 10.0, 0.5, false}, {1e-4, 10.0, 0.8, true}, {1e-4, 20.0, 0.3, false}};
        auto tv_of = [&](const Case& k) {
            const SystemParams p = pump_params(k.kappa, k.g, k.cos4phi, k.emission);
            const DressedRates r = dressed_rates(p);
            const PointSolution s = solve_point(r, k.kappa, SolverSettings{std::nullopt, opts.solver.tail_tol,
                                                                           opts.solver.rel_tol});
            SeriesControl ctl;
            ctl.rel_tol = opts.solver.rel_tol;
            const AnalyticDistribution a =
                analytic_distribution(r, k.kappa, s.ladder.n_max(), Normalization::kummer, ctl);
            if (a.degenerate) throw Error("closed form degenerate (g1 = 0)");
            double tv = 0.0;
            for (std::size_t n = 0; n < a.p.size(); ++n) tv += std::abs(a.p[n] - s.ladder.p1[n]);
            return std::tuple{0.5 * tv, r.gamma_plus / k.kappa, k.kappa / r.g1};
        };
        int i = 0;
        for (const Case& k : cases) {
            const auto [tv, pump, coupling] = tv_of(k);
            ++i;
            c.notes.push_back("set " + std::to_string(i) + ": kappa=" + fmt(k.kappa) + " g=" + fmt(k.g) +
                              " cos4phi=" + fmt(k.cos4phi) + (k.emission ? " no gap" : " gap") +
                              ", gamma_+/kappa=" + fmt(pump) + ", kappa/g1=" + fmt(coupling));
            if (pump < 100.0 || coupling > 1e-2) throw Error("parameter set outside the closed-form regime");
            c.measurements.push_back(measure("TV distance, set " + std::to_string(i), tv, "<=", 1e-2));
        }
        const auto [tv_sweep, pump1, coupling1] = tv_of({kSweepKappa, kSweepG, 0.5, false});
        c.notes.push_back("sweep scale (kappa=1e-3, g=10, cos4phi=0.5, gap): TV=" + fmt(tv_sweep) +
                          ", gamma_+/kappa=" + fmt(pump1));
    });
}

CheckResult check_oracle_equivalence(const ValidationOptions& opts) {
    return guarded("oracle_equivalence", "ladder steady state = partial trace of the Liouvillian null vector",
                   [&](CheckResult& c) {
        const auto t0 = Clock::now();
        std::mt19937 rng(opts.seed);
        std::uniform_real_distribution<double> kap(0.05, 0.5), gg(0.3, 3.0), x(0.05, 0.95);
        std::bernoulli_distribution flag(0.7);
        constexpr std::size_t n_max = 40;
        double worst = 0.0, min_eig = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 5; ++k) {
            SystemParams p = pump_params(kap(rng), gg(rng), x(rng), true);
            p.gap = GapFlags{flag(rng), flag(rng), true};
            const DressedRates r = dressed_rates(p);
            LadderOptions lo;
            lo.check_tail = false;
            const PhotonLadder ladder = steady_state(r, p.kappa, n_max, lo);
            const Liouvillian l(r, p.kappa, n_max);
            const DensityMatrix rho = steady_state_density(l);
            const auto pn = photon_distribution(rho, l.space());
            double diff = 0.0;
            for (std::size_t n = 0; n <= n_max; ++n) diff = std::max(diff, std::abs(pn[n] - ladder.p1[n]));
            worst = std::max(worst, diff);
            min_eig = std::min(min_eig, diagnose(rho, &l).min_eigenvalue);
            c.notes.push_back("kappa=" + fmt(p.kappa) + " g=" + fmt(p.g) + " cos4phi=" +
                              fmt(std::get<PumpDrive>(p.drive).cos4phi) + " " + gap_label(p.gap) +
                              ": max |dP_n| = " + fmt(diff));
        }
        c.measurements.push_back(measure("max entrywise |dP_n|", worst, "<=", 1e-8));
        c.measurements.push_back(measure("min eigenvalue of rho_ss", min_eig, ">=", -1e-10));
        c.measurements.push_back(measure("runtime [s]", seconds_since(t0), "<=", 30.0));
    });
}

CheckResult check_spectrum_below_threshold(const ValidationOptions&) {
    return guarded("spectrum_below_threshold", "Delta_a = -10 eps: two dominant peaks at +-g1",
                   [&](CheckResult& c) {
        const PanelResult& p = spectrum_pair().below;
        const double g1 = p.rates.g1;
        double worst = std::numeric_limits<double>::infinity();
        const auto& pos = p.spectrum.peak_positions;
        const bool split = pos.size() == 2 && pos[0] < 0.0 && pos[1] > 0.0;
        if (split) worst = std::max(rel_err(-pos[0], g1), rel_err(pos[1], g1));
        std::ostringstream s;
        s << "g1=" << fmt(g1) << ", <n>=" << fmt(p.mean_n) << ", N=" << p.n_used << ", peaks:";
        for (double w : pos) s << ' ' << fmt(w);
        c.notes.push_back(s.str());
        c.notes.push_back("horizon " + fmt(p.horizon) + ", |g(T)|/|g(0)|=" + fmt(p.horizon_ratio));
        c.measurements.push_back(measure("dominant peaks", static_cast<double>(pos.size()), "==", 2.0));
        c.measurements.push_back(measure("max | |peak| - g1 | / g1", worst, "<=", 0.05));
    });
}

CheckResult check_spectrum_above_threshold(const ValidationOptions&) {
    return guarded("spectrum_above_threshold", "Delta_a = +10 eps: single narrow line at the lasing frequency",
                   [&](CheckResult& c) {
        const SpectrumPair& f = spectrum_pair();
        const PanelResult& p = f.above;
        const auto& pos = p.spectrum.peak_positions;
        const double fwhm = p.spectrum.fwhm.value_or(std::numeric_limits<double>::quiet_NaN());
        std::ostringstream s;
        s << "<n>=" << fmt(p.mean_n) << ", N=" << p.n_used << ", grid " << p.grid << ", peaks:";
        for (double w : pos) s << ' ' << fmt(w);
        c.notes.push_back(s.str());
        c.notes.push_back("horizon " + fmt(p.horizon) + ", |g(T)|/|g(0)|=" + fmt(p.horizon_ratio));
        c.notes.push_back("FWHM relative to 0.005: " + fmt(fwhm / 0.005));
        c.measurements.push_back(measure("dominant peaks", static_cast<double>(pos.size()), "==", 1.0));
        c.measurements.push_back(measure("|peak position|", pos.empty() ? INFINITY : std::abs(pos[0]), "<=", 1e-3));
        c.measurements.push_back(measure("FWHM (lower bound)", fwhm, ">=", 0.003));
        c.measurements.push_back(measure("FWHM (upper bound)", fwhm, "<=", 0.008));
        c.measurements.push_back(measure("FWHM - kappa", fwhm - p.params.kappa, "<", 0.0));
        c.measurements.push_back(measure("FWHM - gamma", fwhm - p.params.gamma, "<", 0.0));
        c.measurements.push_back(measure("runtime [s]", f.seconds_above, "<=", 300.0));
    });
}

CheckResult check_properties(const ValidationOptions& opts) {
    return guarded("properties", "trace, positivity, normalization, Fourier consistency, special functions",
                   [&](CheckResult& c) {
        // trace preservation of the Liouvillian flow from a random mixed state
        {
            std::mt19937 rng(opts.seed + 1);
            std::normal_distribution<double> nd;
            SystemParams p = pump_params(0.1, 1.5, 0.6, true);
            const Liouvillian l(dressed_rates(p), p.kappa, 20);
            const auto d = static_cast<Eigen::Index>(l.space().dim());
            Eigen::MatrixXcd m(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(nd(rng), nd(rng));
            DensityMatrix rho = m * m.adjoint();
            rho /= rho.trace();
            constexpr double t = 10.0;
            const Eigen::VectorXcd x0 = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
            const Eigen::VectorXcd xt = l.propagate(x0, t);
            const DensityMatrix rt = Eigen::Map<const DensityMatrix>(xt.data(), d, d);
            c.measurements.push_back(
                measure("Liouvillian trace drift per unit time", std::abs(rt.trace() - cplx(1.0)) / t, "<=", 1e-9));

            const DressedRates r = dressed_rates(p);
            const double dt = 0.05 / ladder_stiffness(r, p.kappa, 60);
            const PhotonLadder e = evolve(PhotonLadder::ground(60), r, p.kappa, dt, t);
            c.measurements.push_back(measure("ladder trace drift per unit time", std::abs(e.trace() - 1.0) / t, "<=",
                                             1e-9));
        }
        // positivity and normalization over the reference and low-pump sweeps
        {
            std::vector<SystemParams> pts =
                pump_sweep_grid(21, 0.0, 1.0, pump_params(kSweepKappa, kSweepG, 0.0, true));
            for (int k = 1; k <= 15; ++k) pts.push_back(pump_params(0.2, 2000.0, 0.004 * k, false));
            double p_min = std::numeric_limits<double>::infinity(), norm = 0.0;
            for (const auto& p : pts) {
                const auto s = solve_point(dressed_rates(p), p.kappa, SolverSettings{});
                p_min = std::min(p_min, *std::min_element(s.ladder.p1.begin(), s.ladder.p1.end()));
                long double sum = 0.0L;
                for (double v : s.ladder.p1) sum += v;
                norm = std::max(norm, static_cast<double>(std::abs(sum - 1.0L)));
            }
            c.measurements.push_back(measure("min P_n", p_min, ">=", -1e-10));
            c.measurements.push_back(measure("max |sum P_n - 1|", norm, "<=", 1e-9));
        }
        // Fourier consistency on wide, fine grids covering each reference spectrum
        {
            const SpectrumPair& f = spectrum_pair();
            for (const PanelResult* p : {&f.below, &f.above}) {
                const double half = p == &f.below ? 1.5 * p->rates.g1 : 3.0;
                const auto omega = uniform_grid(-half, half, 12001);
                SpectrumOptions so;
                so.allow_undecayed = true;
                const SpectrumResult s = spectrum(p->correlation.g, p->correlation.tau, omega, so);
                const double g0 = p->correlation.g[0].real();
                c.notes.push_back(p->label + ": g(0)=" + fmt(g0) + ", <n>=" + fmt(p->mean_n) +
                                  ", int S dw/2pi=" + fmt(s.integral));
                c.measurements.push_back(
                    measure("Fourier consistency |int S/2pi - <n>|/<n>, " + p->label, rel_err(s.integral, p->mean_n),
                            "<=", 0.02));
                c.measurements.push_back(
                    measure("|g(0) - <n>|, " + p->label, std::abs(p->correlation.g[0] - cplx(p->mean_n)), "<=", 1e-9));
            }
        }
        // special-function identities
        {
            double lg = 0.0;
            for (double x = 0.05; x <= 200.0; x *= 1.37)
                lg = std::max(lg, std::abs(std::expm1(ln_gamma(x + 1.0) - ln_gamma(x) - std::log(x))));
            c.measurements.push_back(measure("max |Gamma(x+1)/(x Gamma(x)) - 1|", lg, "<=", 1e-10));
            double rec = 0.0, closed = 0.0;
            for (double b : {0.5, 1.5008, 3.0, 17.25, 120.0})
                for (double z : {0.0, 0.3, 4.0, 45.0, 300.0}) {
                    const double lhs = kummer_1f1_a1(b, z);
                    const double rhs = 1.0 + z / b * kummer_1f1_a1(b + 1.0, z);
                    rec = std::max(rec, rel_err(lhs, rhs));
                }
            for (double z : {0.1, 1.0, 10.0, 100.0})
                closed = std::max(closed, rel_err(kummer_1f1_a1(2.0, z), std::expm1(z) / z));
            c.measurements.push_back(measure("1F1 contiguous recurrence rel. error", rec, "<=", 1e-10));
            c.measurements.push_back(measure("1F1(1,2;z) = (e^z-1)/z rel. error", closed, "<=", 1e-10));
        }
    });
}

CheckResult check_truncation(const ValidationOptions& opts) {
    return guarded("truncation", "tail probability P_N below tail_tol at the truncation in use",
                   [&](CheckResult& c) {
        const SystemParams p = pump_params(kSweepKappa, kSweepG, 0.5, true);
        const DressedRates r = dressed_rates(p);
        PhotonLadder ladder;
        if (opts.solver.n_override) {
            LadderOptions lo;
            lo.check_tail = false;
            ladder = steady_state(r, p.kappa, *opts.solver.n_override, lo);
            c.notes.push_back("N from solver.N_override = " + std::to_string(*opts.solver.n_override));
        } else {
            ladder = solve_adaptive(r, p.kappa, opts.solver.tail_tol).ladder;
            c.notes.push_back("adaptive N = " + std::to_string(ladder.n_max()));
        }
        c.measurements.push_back(measure("P_N at reference point", ladder.p1.back(), "<", opts.solver.tail_tol));
    });
}

std::vector<CheckResult> run_validation_suite(const ValidationOptions& opts) {
    return {check_threshold_location(opts),       check_thresholdless_linearity(opts),
            check_statistics_signatures(opts),    check_low_pump_regime(opts),
            check_analytic_distribution(opts),    check_oracle_equivalence(opts),
            check_spectrum_below_threshold(opts), check_spectrum_above_threshold(opts),
            check_properties(opts),               check_truncation(opts)};
}

}  // namespace pbglaser

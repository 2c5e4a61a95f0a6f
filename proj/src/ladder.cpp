#include "pbglaser/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbglaser/errors.hpp"

namespace pbglaser {

namespace {

constexpr std::size_t kBlock = 4;
constexpr std::size_t kLower = 6;
constexpr std::size_t kUpper = 4;

std::size_t idx(std::size_t n, std::size_t component) { return kBlock * n + component; }

std::vector<double> flatten(const PhotonLadder& s) {
    const std::size_t n1 = s.p1.size();
    std::vector<double> x(kBlock * n1);
    for (std::size_t n = 0; n < n1; ++n) {
        x[idx(n, 0)] = s.p1[n];
        x[idx(n, 1)] = s.p2[n];
        x[idx(n, 2)] = s.p3[n];
        x[idx(n, 3)] = s.p4[n];
    }
    return x;
}

PhotonLadder unflatten(std::span<const double> x) {
    const std::size_t n1 = x.size() / kBlock;
    PhotonLadder s = PhotonLadder::zeros(n1 - 1);
    for (std::size_t n = 0; n < n1; ++n) {
        s.p1[n] = x[idx(n, 0)];
        s.p2[n] = x[idx(n, 1)];
        s.p3[n] = x[idx(n, 2)];
        s.p4[n] = x[idx(n, 3)];
    }
    return s;
}

void check_inputs(const DressedRates& r, double kappa, std::size_t n_max) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (n_max < 2) throw DomainError("Fock truncation must be >= 2");
    if (r.gamma0 < 0.0 || r.gamma_plus < 0.0 || r.gamma_minus < 0.0 || r.g1 < 0.0)
        throw DomainError("dressed rates must be nonnegative");
}

double threshold_photons(const DressedRates& r, double kappa) {
    return std::max(0.0, (r.gamma_plus - r.gamma_minus) / (2.0 * kappa));
}

// Solve A x = 0 with the P1 row at `pin` replaced by x[pin] = 1.
std::vector<double> solve_pinned(const BandedMatrix& gen, std::size_t pin) {
    BandedMatrix a = gen;
    const std::size_t nv = a.size();
    // structural zeros: identity rows
    const std::size_t n_max = nv / kBlock - 1;
    a.set(idx(0, 2), idx(0, 2), 1.0);
    a.set(idx(n_max, 3), idx(n_max, 3), 1.0);

    a.clear_row(idx(pin, 0));
    a.set(idx(pin, 0), idx(pin, 0), 1.0);
    std::vector<double> x(nv, 0.0);
    x[idx(pin, 0)] = 1.0;
    BandedLU(std::move(a)).solve(x);
    return x;
}

double residual_of(const BandedMatrix& gen, std::span<const double> x) {
    std::vector<double> ax(x.size());
    gen.multiply(x, ax);
    double xmax = 0.0;
    for (double v : x) xmax = std::max(xmax, std::abs(v));
    if (xmax == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double scale = gen.row_norm(i) * xmax;
        if (scale == 0.0) {
            // structural zero: its value is the residual
            worst = std::max(worst, std::abs(x[i]) / xmax);
            continue;
        }
        worst = std::max(worst, std::abs(ax[i]) / scale);
    }
    return worst;
}

}  // namespace

double PhotonLadder::trace() const {
    long double s = 0.0L;
    for (double v : p1) s += v;
    return static_cast<double>(s);
}

PhotonLadder PhotonLadder::zeros(std::size_t n_max) {
    PhotonLadder s;
    s.p1.assign(n_max + 1, 0.0);
    s.p2.assign(n_max + 1, 0.0);
    s.p3.assign(n_max + 1, 0.0);
    s.p4.assign(n_max + 1, 0.0);
    return s;
}

PhotonLadder PhotonLadder::ground(std::size_t n_max) {
    PhotonLadder s = zeros(n_max);
    s.p1[0] = 1.0;
    s.p2[0] = 1.0;
    return s;
}

BandedMatrix ladder_generator(const DressedRates& r, double kappa, std::size_t n_max) {
    check_inputs(r, kappa, n_max);
    const std::size_t N = n_max;
    BandedMatrix a(kBlock * (N + 1), kLower, kUpper);

    const double gp = r.gamma_plus;
    const double gm = r.gamma_minus;
    const double g1 = r.g1;
    const double coh = kCoherenceDephasingWeight * r.gamma0 + gp + gm;

    for (std::size_t n = 0; n <= N; ++n) {
        const double dn = static_cast<double>(n);

        // P1
        std::size_t row = idx(n, 0);
        a.add(row, idx(n, 0), -kappa * dn);
        if (n < N) a.add(row, idx(n + 1, 0), kappa * (dn + 1.0));
        a.add(row, idx(n, 2), -2.0 * g1);
        a.add(row, idx(n, 3), 2.0 * g1);

        // P2
        row = idx(n, 1);
        a.add(row, idx(n, 1), -(gp + gm + kappa * dn));
        a.add(row, idx(n, 0), -(gp - gm));
        if (n < N) a.add(row, idx(n + 1, 1), kappa * (dn + 1.0));
        a.add(row, idx(n, 2), -2.0 * g1);
        a.add(row, idx(n, 3), -2.0 * g1);

        // P3
        if (n > 0) {
            row = idx(n, 2);
            a.add(row, idx(n, 2), -0.5 * (coh + kappa * (2.0 * dn - 1.0)));
            const double c = 0.5 * dn * g1;
            a.add(row, idx(n, 0), c);
            a.add(row, idx(n - 1, 0), -c);
            a.add(row, idx(n - 1, 1), c);
            a.add(row, idx(n, 1), c);
            if (n < N) a.add(row, idx(n + 1, 2), kappa * (dn + 1.0));
            a.add(row, idx(n, 3), -kappa);
        }

        // P4
        if (n < N) {
            row = idx(n, 3);
            a.add(row, idx(n, 3), -0.5 * (coh + kappa * (2.0 * dn + 1.0)));
            const double c = 0.5 * (dn + 1.0) * g1;
            a.add(row, idx(n + 1, 0), c);
            a.add(row, idx(n, 0), -c);
            a.add(row, idx(n + 1, 1), c);
            a.add(row, idx(n, 1), c);
            a.add(row, idx(n + 1, 3), kappa * (dn + 1.0));
        }
    }
    return a;
}

PhotonLadder steady_state(const DressedRates& r, double kappa, std::size_t n_max,
                          const LadderOptions& opts) {
    const BandedMatrix gen = ladder_generator(r, kappa, n_max);

    auto normalized = [&](std::size_t pin) -> std::optional<std::vector<double>> {
        std::vector<double> x;
        try {
            x = solve_pinned(gen, pin);
        } catch (const SingularSystemError&) {
            return std::nullopt;
        }
        long double s = 0.0L;
        for (std::size_t n = 0; n <= n_max; ++n) s += x[idx(n, 0)];
        if (!(s > 0.0L) || !std::isfinite(static_cast<double>(s))) return std::nullopt;
        for (double& v : x) v = static_cast<double>(v / s);
        return x;
    };

    auto argmax_p1 = [&](const std::vector<double>& x) {
        std::size_t best = 0;
        for (std::size_t n = 1; n <= n_max; ++n)
            if (x[idx(n, 0)] > x[idx(best, 0)]) best = n;
        return best;
    };

    // Pin where P1 is expected to peak so that the pinned value is not
    // vanishingly small; fall back to the vacuum bin.
    const std::size_t guess = std::min<std::size_t>(
        n_max, static_cast<std::size_t>(std::llround(threshold_photons(r, kappa))));
    std::size_t pin = guess;
    std::optional<std::vector<double>> x = normalized(pin);
    if (!x && pin != 0) x = normalized(pin = 0);
    if (!x) throw SingularSystemError("ladder steady state is not unique for these parameters");

    const std::size_t peak = argmax_p1(*x);
    if (peak != pin) {
        const bool poorly_pinned = (*x)[idx(peak, 0)] * 1e-100 > std::abs((*x)[idx(pin, 0)]);
        const double res = residual_of(gen, *x);
        if (poorly_pinned || res > 1e-10) {
            auto retry = normalized(peak);
            if (retry && residual_of(gen, *retry) <= res) x = std::move(retry);
        }
    }

    const double res = residual_of(gen, *x);
    if (!(res <= 1e-10)) {
        throw SingularSystemError("ladder steady state residual " + std::to_string(res) +
                                  " exceeds 1e-10; parameters are degenerate");
    }

    PhotonLadder out = unflatten(*x);
    // pivoting can leave round-off in the identity rows
    out.p3[0] = 0.0;
    out.p4[n_max] = 0.0;
    if (opts.check_tail && !(out.p1[n_max] < opts.tail_tol)) {
        throw TruncationError("P1[N] = " + std::to_string(out.p1[n_max]) +
                                  " is not below the tail tolerance; increase N",
                              2 * n_max);
    }
    return out;
}

double steady_state_residual(const DressedRates& r, double kappa, const PhotonLadder& state) {
    const BandedMatrix gen = ladder_generator(r, kappa, state.n_max());
    const std::vector<double> x = flatten(state);
    return residual_of(gen, x);
}

double ladder_stiffness(const DressedRates& r, double kappa, std::size_t n_max) {
    const double dn = static_cast<double>(n_max);
    const double coh = kCoherenceDephasingWeight * r.gamma0 + r.gamma_plus + r.gamma_minus;
    return std::max({kappa * dn, coh + 2.0 * kappa * dn, r.g1 * std::sqrt(dn)});
}

PhotonLadder evolve(const PhotonLadder& state, const DressedRates& r, double kappa, double dt,
                    double t_final, const EvolveOptions& opts) {
    const std::size_t N = state.n_max();
    check_inputs(r, kappa, N);
    if (!(dt > 0.0)) throw DomainError("dt must be > 0");
    if (!(t_final >= 0.0)) throw DomainError("t_final must be >= 0");
    if (state.p2.size() != N + 1 || state.p3.size() != N + 1 || state.p4.size() != N + 1)
        throw DomainError("ladder components must have equal length");
    for (std::size_t n = 0; n < N; ++n) {
        if (std::abs(state.p4[n] - state.p3[n + 1]) > 1e-12)
            throw DomainError("inconsistent start: P4[n] must equal P3[n+1]");
    }
    if (state.p3[0] != 0.0 || state.p4[N] != 0.0)
        throw DomainError("inconsistent start: P3[0] and P4[N] must be zero");

    const double stiff = ladder_stiffness(r, kappa, N);
    if (dt * stiff > 0.1) {
        throw StepSizeError("dt * stiffness = " + std::to_string(dt * stiff) +
                            " exceeds 0.1; reduce dt below " + std::to_string(0.1 / stiff));
    }

    const BandedMatrix gen = ladder_generator(r, kappa, N);
    std::vector<double> x = flatten(state);
    const std::size_t nv = x.size();
    std::vector<double> k1(nv), k2(nv), k3(nv), k4(nv), tmp(nv);

    const double trace0 = state.trace();
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt));
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : 0.0;
    double tail_max = std::abs(x[idx(N, 0)]);

    for (std::size_t s = 0; s < steps; ++s) {
        gen.multiply(x, k1);
        for (std::size_t i = 0; i < nv; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        gen.multiply(tmp, k2);
        for (std::size_t i = 0; i < nv; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        gen.multiply(tmp, k3);
        for (std::size_t i = 0; i < nv; ++i) tmp[i] = x[i] + h * k3[i];
        gen.multiply(tmp, k4);
        for (std::size_t i = 0; i < nv; ++i)
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        tail_max = std::max(tail_max, std::abs(x[idx(N, 0)]));
    }

    PhotonLadder out = unflatten(x);
    const double drift = std::abs(out.trace() - trace0);
    if (drift > opts.trace_tol_per_time * std::max(1.0, t_final)) {
        throw StepSizeError("trace drifted by " + std::to_string(drift) + "; reduce dt");
    }
    if (!(tail_max < opts.tail_tol)) {
        throw TruncationError("probability reached the truncation bin N; increase N", 2 * N);
    }
    return out;
}

FieldObservables distribution_observables(std::span<const double> p) {
    long double m1 = 0.0L, m2 = 0.0L;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const long double dn = static_cast<long double>(n);
        m1 += dn * p[n];
        m2 += dn * dn * p[n];
    }
    FieldObservables o;
    o.mean_n = static_cast<double>(m1);
    o.mean_n2 = static_cast<double>(m2);
    if (o.mean_n >= kUndefinedMeanThreshold) {
        // centered second pass; equal to m2 - m1^2 for a normalized p
        long double var = 0.0L;
        for (std::size_t n = 0; n < p.size(); ++n) {
            const long double d = static_cast<long double>(n) - m1;
            var += d * d * p[n];
        }
        o.fano = static_cast<double>(var / m1);
        o.q_mandel = *o.fano - 1.0;
    }
    return o;
}

FieldObservables observables(const PhotonLadder& state) { return distribution_observables(state.p1); }

double analytic_m(const DressedRates& r, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (r.g1 == 0.0) return std::numeric_limits<double>::infinity();
    const double sum = r.gamma_plus + r.gamma_minus;
    const double coh = kCoherenceDephasingWeight * r.gamma0 + sum;
    return 0.5 * (1.0 + r.gamma_minus / kappa + coh * sum / (4.0 * r.g1 * r.g1));
}

AnalyticDistribution analytic_distribution(const DressedRates& r, double kappa, std::size_t n_max,
                                           Normalization norm, const SeriesControl& ctl) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (!(r.gamma_plus > 0.0)) throw DomainError("closed-form distribution needs gamma_plus > 0");

    AnalyticDistribution d;
    d.alpha = r.gamma_plus / (2.0 * kappa);
    d.pump_ratio = r.gamma_plus / kappa;
    d.pump_dominates = d.pump_ratio >= 100.0;
    d.m = analytic_m(r, kappa);
    if (!std::isfinite(d.m)) {
        d.degenerate = true;
        return d;
    }

    const double log_alpha = std::log(d.alpha);
    const double lg_m1 = ln_gamma(d.m + 1.0);
    std::vector<double> logw(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        logw[n] = dn * log_alpha + lg_m1 - ln_gamma(dn + d.m + 1.0);
    }

    d.p.resize(n_max + 1);
    if (norm == Normalization::kummer) {
        const double log_f = log_kummer_1f1_a1(d.m + 1.0, d.alpha, ctl);
        for (std::size_t n = 0; n <= n_max; ++n) d.p[n] = std::exp(logw[n] - log_f);
    } else {
        const double top = *std::max_element(logw.begin(), logw.end());
        long double s = 0.0L;
        for (std::size_t n = 0; n <= n_max; ++n) {
            d.p[n] = std::exp(logw[n] - top);
            s += d.p[n];
        }
        for (double& v : d.p) v = static_cast<double>(v / s);
    }
    return d;
}

AsymptoticObservables asymptotic_observables(const DressedRates& r, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (!(r.gamma_plus > 0.0)) throw DomainError("asymptotic observables undefined for gamma_plus = 0");
    AsymptoticObservables a;
    a.mean_n = (r.gamma_plus - r.gamma_minus) / (2.0 * kappa);
    a.q = (r.gamma_minus + kappa) / r.gamma_plus;
    a.above_threshold = r.gamma_plus > r.gamma_minus;
    return a;
}

LowPumpObservables low_pump_observables(double alpha) {
    if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
    return {2.0 * alpha * (1.0 - 2.0 * alpha), -2.0 * alpha / 3.0};
}

std::size_t initial_truncation(const DressedRates& r, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    const double nh = threshold_photons(r, kappa);
    const double guess = std::ceil(nh + 12.0 * std::sqrt(nh + 1.0));
    return std::max<std::size_t>(30, static_cast<std::size_t>(guess));
}

AdaptiveSolution solve_adaptive(const DressedRates& r, double kappa, double tail_tol,
                                std::size_t hard_cap) {
    if (!(tail_tol > 0.0)) throw DomainError("tail_tol must be > 0");
    std::size_t n = initial_truncation(r, kappa);
    LadderOptions opts;
    opts.tail_tol = tail_tol;
    opts.check_tail = false;
    while (true) {
        if (n > hard_cap) {
            throw ResourceError("Fock truncation " + std::to_string(n) + " exceeds the cap " +
                                std::to_string(hard_cap));
        }
        PhotonLadder ladder = steady_state(r, kappa, n, opts);
        if (ladder.p1[n] < tail_tol) {
            const double res = steady_state_residual(r, kappa, ladder);
            return {std::move(ladder), res};
        }
        n = (n == hard_cap) ? hard_cap + 1 : std::min(2 * n, hard_cap);
    }
}

std::size_t choose_truncation(const DressedRates& r, double kappa, double tail_tol, std::size_t hard_cap) {
    return solve_adaptive(r, kappa, tail_tol, hard_cap).ladder.n_max();
}

}  // namespace pbglaser

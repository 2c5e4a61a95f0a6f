#include "pbglaser/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "pbglaser/errors.hpp"

namespace pbglaser {

namespace {

using Triplet = Eigen::Triplet<cplx>;

SparseOp from_triplets(std::size_t rows, std::size_t cols, const std::vector<Triplet>& t) {
    SparseOp m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

// Accumulates superoperator terms acting on column-major vec(rho).
class SuperBuilder {
public:
    explicit SuperBuilder(std::size_t dim) : d_(dim) {}

    // c * A rho
    void left(const SparseOp& a, cplx c) {
        for (Eigen::Index k = 0; k < a.outerSize(); ++k)
            for (SparseOp::InnerIterator it(a, k); it; ++it)
                for (std::size_t j = 0; j < d_; ++j)
                    push(it.row() + d_ * j, it.col() + d_ * j, c * it.value());
    }

    // c * rho B
    void right(const SparseOp& b, cplx c) {
        for (Eigen::Index k = 0; k < b.outerSize(); ++k)
            for (SparseOp::InnerIterator it(b, k); it; ++it)  // B(kk, j)
                for (std::size_t i = 0; i < d_; ++i)
                    push(i + d_ * it.col(), i + d_ * it.row(), c * it.value());
    }

    // c * A rho B
    void sandwich(const SparseOp& a, const SparseOp& b, cplx c) {
        for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka)
            for (SparseOp::InnerIterator ia(a, ka); ia; ++ia)
                for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb)
                    for (SparseOp::InnerIterator ib(b, kb); ib; ++ib)
                        push(ia.row() + d_ * ib.col(), ia.col() + d_ * ib.row(),
                             c * ia.value() * ib.value());
    }

    // rate * (c rho c^dag - {c^dag c, rho}/2)
    void dissipator(const SparseOp& c, double rate) {
        if (rate == 0.0) return;
        const SparseOp cd = SparseOp(c.adjoint());
        const SparseOp cdc = cd * c;
        sandwich(c, cd, rate);
        left(cdc, -0.5 * rate);
        right(cdc, -0.5 * rate);
    }

    std::size_t size() const { return t_.size(); }
    SparseOp build() const { return from_triplets(d_ * d_, d_ * d_, t_); }

private:
    void push(std::size_t r, std::size_t c, cplx v) {
        if (v != cplx{}) t_.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
    }

    std::size_t d_;
    std::vector<Triplet> t_;
};

// Upper bound on the number of superoperator triplets: the sandwich terms
// dominate with at most dim * (nnz per operator) entries per column.
std::size_t estimate_triplets(std::size_t dim) { return 16 * dim * dim; }

Eigen::VectorXcd vec(const DensityMatrix& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

DensityMatrix unvec(const Eigen::VectorXcd& v, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return Eigen::Map<const DensityMatrix>(v.data(), d, d);
}

template <class Apply>
void rk4_step(Eigen::VectorXcd& x, double h, Apply&& f, Eigen::VectorXcd& k1, Eigen::VectorXcd& k2,
              Eigen::VectorXcd& k3, Eigen::VectorXcd& k4) {
    k1 = f(x);
    k2 = f(x + 0.5 * h * k1);
    k3 = f(x + 0.5 * h * k2);
    k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double gershgorin(const SparseOp& m) {
    // column sums bound the spectral radius as well as row sums
    double best = 0.0;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        double s = 0.0;
        for (SparseOp::InnerIterator it(m, k); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

int FockAtomSpace::excitation(std::size_t state) const {
    const std::size_t atom = state / photons();
    const std::size_t n = state % photons();
    return static_cast<int>(n) + (atom == 0 ? 1 : 0);
}

Liouvillian::Liouvillian(const DressedRates& rates, double kappa, std::size_t n_max,
                         const LiouvillianOptions& opts)
    : rates_(rates), kappa_(kappa), space_{n_max} {
    if (n_max < 2) throw DomainError("Fock truncation must be >= 2");
    if (!(kappa >= 0.0)) throw DomainError("kappa must be >= 0");
    const std::size_t d = space_.dim();
    const std::size_t est = estimate_triplets(d) * (sizeof(cplx) + sizeof(int));
    if (est > opts.max_bytes) {
        throw ResourceError("superoperator for N = " + std::to_string(n_max) + " needs ~" +
                            std::to_string(est >> 20) + " MiB, above the configured cap");
    }

    const std::size_t np = space_.photons();
    std::vector<Triplet> ta, t12, t21, t3;
    for (std::size_t atom = 0; atom < 2; ++atom)
        for (std::size_t n = 1; n < np; ++n)
            ta.emplace_back(static_cast<int>(space_.index(atom, n - 1)),
                            static_cast<int>(space_.index(atom, n)), std::sqrt(static_cast<double>(n)));
    for (std::size_t n = 0; n < np; ++n) {
        const int i1 = static_cast<int>(space_.index(0, n));
        const int i2 = static_cast<int>(space_.index(1, n));
        t12.emplace_back(i1, i2, 1.0);  // |1~><2~|
        t21.emplace_back(i2, i1, 1.0);  // |2~><1~|
        t3.emplace_back(i1, i1, -1.0);
        t3.emplace_back(i2, i2, 1.0);
    }
    a_ = from_triplets(d, d, ta);
    const SparseOp r12 = from_triplets(d, d, t12);
    const SparseOp r21 = from_triplets(d, d, t21);
    const SparseOp r3 = from_triplets(d, d, t3);
    const SparseOp ad = SparseOp(a_.adjoint());

    SuperBuilder b(d);
    // -g1 [a^dag R21 - R12 a, rho]
    const SparseOp coupling = SparseOp(ad * r21) - SparseOp(r12 * a_);
    b.left(coupling, -rates.g1);
    b.right(coupling, rates.g1);
    // The R3 channel dephases rho_12 at rate w * gamma0 / 2.
    b.dissipator(r3, kCoherenceDephasingWeight * rates.gamma0 / 4.0);
    b.dissipator(r21, rates.gamma_minus);
    b.dissipator(r12, rates.gamma_plus);
    b.dissipator(a_, kappa);
    l_ = b.build();
}

DensityMatrix Liouvillian::apply(const DensityMatrix& rho) const {
    const Eigen::VectorXcd y = l_ * vec(rho);
    return unvec(y, space_.dim());
}

double Liouvillian::spectral_radius_bound() const { return gershgorin(l_); }

Liouvillian::Sector Liouvillian::sector(int order) const {
    const std::size_t d = space_.dim();
    Sector s;
    std::unordered_map<std::size_t, int> pos;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i)
            if (space_.excitation(i) - space_.excitation(j) == order) {
                pos.emplace(i + d * j, static_cast<int>(s.entries.size()));
                s.entries.push_back(i + d * j);
            }
    std::vector<Triplet> t;
    for (std::size_t c = 0; c < s.entries.size(); ++c) {
        for (SparseOp::InnerIterator it(l_, static_cast<Eigen::Index>(s.entries[c])); it; ++it) {
            const auto found = pos.find(static_cast<std::size_t>(it.row()));
            if (found == pos.end()) {
                if (std::abs(it.value()) != 0.0)
                    throw Error("internal: Liouvillian does not conserve coherence order");
                continue;
            }
            t.emplace_back(found->second, static_cast<int>(c), it.value());
        }
    }
    s.block = from_triplets(s.entries.size(), s.entries.size(), t);
    return s;
}

Eigen::VectorXcd Liouvillian::propagate(const Eigen::VectorXcd& x0, double t, double step_factor) const {
    if (!(t >= 0.0)) throw DomainError("propagation time must be >= 0");
    const double radius = std::max(spectral_radius_bound(), 1e-300);
    const auto steps = static_cast<std::size_t>(std::ceil(t * radius / step_factor));
    Eigen::VectorXcd x = x0;
    if (steps == 0) return x;
    const double h = t / static_cast<double>(steps);
    Eigen::VectorXcd k1, k2, k3, k4;
    auto f = [this](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return l_ * v; };
    for (std::size_t s = 0; s < steps; ++s) rk4_step(x, h, f, k1, k2, k3, k4);
    return x;
}

DensityMatrix steady_state_density(const Liouvillian& l, const SteadyStateOptions& opts) {
    const FockAtomSpace& sp = l.space();
    const std::size_t d = sp.dim();
    const auto n2 = static_cast<Eigen::Index>(d * d);
    const double radius = l.spectral_radius_bound();
    if (radius == 0.0) throw DegenerateNullSpaceError("zero Liouvillian: every state is stationary");

    SparseOp shifted = l.matrix();
    SparseOp id(n2, n2);
    id.setIdentity();
    shifted -= cplx(-opts.shift_factor * radius) * id;
    shifted.makeCompressed();

    Eigen::SparseLU<SparseOp> lu;
    lu.analyzePattern(shifted);
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success) throw Error("steady state: sparse LU factorization failed");

    auto run = [&](std::size_t start_state) {
        DensityMatrix rho = DensityMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        rho(static_cast<Eigen::Index>(start_state), static_cast<Eigen::Index>(start_state)) = 1.0;
        Eigen::VectorXcd x = vec(rho);
        for (int it = 0; it < opts.max_iterations; ++it) {
            x = lu.solve(x);
            DensityMatrix m = unvec(x, d);
            const cplx tr = m.trace();
            if (std::abs(tr) == 0.0 || !std::isfinite(std::abs(tr)))
                throw Error("steady state: inverse iteration lost the trace");
            m /= tr;
            m = 0.5 * (m + m.adjoint()).eval();
            x = vec(m);
            const double res = (l.matrix() * x).cwiseAbs().maxCoeff();
            if (res <= opts.residual_tol) return m;
        }
        throw IterationLimitError("steady state: inverse iteration did not reach the residual tolerance",
                                  (l.matrix() * x).cwiseAbs().maxCoeff());
    };

    const DensityMatrix a = run(sp.index(0, 0));
    const DensityMatrix b = run(sp.index(1, 0));
    const double diff = (a - b).cwiseAbs().maxCoeff();
    if (diff > opts.uniqueness_tol) {
        throw DegenerateNullSpaceError("stationary state depends on the initial state (difference " +
                                       std::to_string(diff) + ")");
    }
    return a;
}

DensityMatrix steady_state_density_dense(const Liouvillian& l) {
    const std::size_t d = l.space().dim();
    if (d * d > 400) throw ResourceError("dense cross-check limited to superoperator dimension 400");
    const Eigen::MatrixXcd m = Eigen::MatrixXcd(l.matrix());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw Error("dense eigendecomposition failed");
    Eigen::Index best = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&best);
    DensityMatrix rho = unvec(es.eigenvectors().col(best), d);
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

DensityDiagnostics diagnose(const DensityMatrix& rho, const Liouvillian* l) {
    DensityDiagnostics out;
    out.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    out.trace_error = std::abs(rho.trace() - cplx(1.0));
    const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    if (l != nullptr) out.residual = l->apply(rho).cwiseAbs().maxCoeff();
    return out;
}

std::vector<double> photon_distribution(const DensityMatrix& rho, const FockAtomSpace& space) {
    std::vector<double> p(space.photons());
    for (std::size_t n = 0; n < space.photons(); ++n) {
        const auto i1 = static_cast<Eigen::Index>(space.index(0, n));
        const auto i2 = static_cast<Eigen::Index>(space.index(1, n));
        p[n] = rho(i1, i1).real() + rho(i2, i2).real();
    }
    return p;
}

DressedPopulations dressed_populations(const DensityMatrix& rho, const FockAtomSpace& space) {
    DressedPopulations out;
    for (std::size_t n = 0; n < space.photons(); ++n) {
        const auto i1 = static_cast<Eigen::Index>(space.index(0, n));
        const auto i2 = static_cast<Eigen::Index>(space.index(1, n));
        out.p1 += rho(i1, i1).real();
        out.p2 += rho(i2, i2).real();
    }
    return out;
}

std::vector<double> uniform_tau_grid(double step, double horizon) {
    if (!(step > 0.0) || !(horizon > 0.0)) throw DomainError("tau grid needs step > 0 and horizon > 0");
    const auto n = static_cast<std::size_t>(std::llround(horizon / step));
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = step * static_cast<double>(k);
    return t;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) throw DomainError("grid needs >= 2 points and hi > lo");
    std::vector<double> w(points);
    const double span = hi - lo;
    for (std::size_t i = 0; i < points; ++i)
        w[i] = lo + span * static_cast<double>(i) / static_cast<double>(points - 1);
    return w;
}

Correlation correlation(const Liouvillian& l, const DensityMatrix& rho_ss, std::span<const double> tau_grid,
                        const CorrelationOptions& opts) {
    if (tau_grid.size() < 2 || tau_grid[0] != 0.0) throw DomainError("tau grid must start at 0");
    const double step = tau_grid[1] - tau_grid[0];
    for (std::size_t k = 1; k < tau_grid.size(); ++k) {
        if (std::abs((tau_grid[k] - tau_grid[k - 1]) - step) > 1e-9 * step)
            throw DomainError("tau grid must be uniform");
    }

    const FockAtomSpace& sp = l.space();
    const std::size_t d = sp.dim();
    const SparseOp& a = l.annihilation();
    const DensityMatrix x0 = a * rho_ss;

    // a rho_ss has coherence order -1; propagate only that invariant block.
    const Liouvillian::Sector sec = l.sector(-1);
    const std::size_t m = sec.entries.size();
    Eigen::VectorXcd x(static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < m; ++c) x(static_cast<Eigen::Index>(c)) = x0.data()[sec.entries[c]];

    // Tr(a^dag X) = sum_ij conj(a_ij) X_ij
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
    {
        std::unordered_map<std::size_t, std::size_t> pos;
        for (std::size_t c = 0; c < m; ++c) pos.emplace(sec.entries[c], c);
        for (Eigen::Index k = 0; k < a.outerSize(); ++k)
            for (SparseOp::InnerIterator it(a, k); it; ++it) {
                const auto found = pos.find(static_cast<std::size_t>(it.row()) + d * static_cast<std::size_t>(it.col()));
                if (found != pos.end()) w(static_cast<Eigen::Index>(found->second)) = std::conj(it.value());
            }
    }

    const double radius = std::max(gershgorin(sec.block), 1e-300);
    const auto sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(step * radius / opts.step_factor)));
    const double h = step / static_cast<double>(sub);

    Correlation out;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    out.g.resize(tau_grid.size());
    Eigen::VectorXcd k1, k2, k3, k4;
    auto f = [&sec](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return sec.block * v; };
    out.g[0] = w.cwiseProduct(x).sum();
    for (std::size_t k = 1; k < tau_grid.size(); ++k) {
        for (std::size_t s = 0; s < sub; ++s) rk4_step(x, h, f, k1, k2, k3, k4);
        out.g[k] = w.cwiseProduct(x).sum();
        if (!std::isfinite(std::abs(out.g[k]))) throw StepSizeError("correlation propagation became unstable");
    }
    const double g0 = std::abs(out.g[0]);
    out.horizon_ratio = g0 > 0.0 ? std::abs(out.g.back()) / g0 : 0.0;
    out.decayed = out.horizon_ratio <= opts.horizon_ratio;
    return out;
}

SpectrumResult spectrum(std::span<const cplx> g, std::span<const double> tau, std::span<const double> omega,
                        const SpectrumOptions& opts) {
    if (g.size() != tau.size() || g.size() < 2) throw DomainError("spectrum: g and tau must match");
    if (omega.size() < 3) throw DomainError("spectrum: omega grid needs >= 3 points");
    const double g0 = std::abs(g[0]);
    const double ratio = g0 > 0.0 ? std::abs(g.back()) / g0 : 0.0;
    if (ratio > opts.horizon_ratio && !opts.allow_undecayed) {
        throw HorizonError("correlation has not decayed at the horizon (|g(T)|/|g(0)| = " +
                               std::to_string(ratio) + "); increase the horizon",
                           ratio);
    }
    const double h = tau[1] - tau[0];
    const double dw = omega[1] - omega[0];
    for (std::size_t i = 1; i < omega.size(); ++i) {
        if (std::abs((omega[i] - omega[i - 1]) - dw) > 1e-9 * std::abs(dw))
            throw DomainError("spectrum: omega grid must be uniform");
    }

    SpectrumResult out;
    out.omega.assign(omega.begin(), omega.end());
    std::vector<double> raw(omega.size());
    const std::size_t nt = g.size();
    for (std::size_t i = 0; i < omega.size(); ++i) {
        // e^{i w tau_k} by recurrence, renormalized to stay on the unit circle
        const cplx step = std::polar(1.0, omega[i] * h);
        cplx phase = std::polar(1.0, omega[i] * tau[0]);
        cplx acc = 0.5 * phase * g[0];
        for (std::size_t k = 1; k < nt; ++k) {
            phase *= step;
            if ((k & 1023) == 0) phase = std::polar(1.0, omega[i] * tau[k]);
            acc += (k + 1 == nt ? 0.5 : 1.0) * phase * g[k];
        }
        raw[i] = 2.0 * h * acc.real();
    }

    out.scale = *std::max_element(raw.begin(), raw.end());
    double integral = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i)
        integral += (i == 0 || i + 1 == raw.size() ? 0.5 : 1.0) * raw[i];
    out.integral = integral * dw / (2.0 * std::numbers::pi);

    out.s.resize(raw.size());
    const double norm = out.scale > 0.0 ? out.scale : 1.0;
    for (std::size_t i = 0; i < raw.size(); ++i) out.s[i] = raw[i] / norm;

    const std::vector<double>& s = out.s;
    auto half_width = [&](std::size_t k, double level) -> std::optional<double> {
        std::size_t i = k;
        while (i > 0 && s[i] > level) --i;
        if (s[i] > level) return std::nullopt;
        std::size_t j = k;
        while (j + 1 < s.size() && s[j] > level) ++j;
        if (s[j] > level) return std::nullopt;
        const double wl = omega[i] + (level - s[i]) * (omega[i + 1] - omega[i]) / (s[i + 1] - s[i]);
        const double wr = omega[j - 1] + (level - s[j - 1]) * (omega[j] - omega[j - 1]) / (s[j] - s[j - 1]);
        return wr - wl;
    };

    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (!(s[i] > s[i - 1] && s[i] >= s[i + 1]) || s[i] < opts.peak_floor) continue;
        const double den = s[i - 1] - 2.0 * s[i] + s[i + 1];
        const double delta = den != 0.0 ? 0.5 * (s[i - 1] - s[i + 1]) / den : 0.0;
        SpectralPeak p;
        p.position = omega[i] + delta * dw;
        p.height = s[i] - 0.25 * (s[i - 1] - s[i + 1]) * delta;
        p.fwhm = half_width(i, 0.5 * s[i]);
        out.peaks.push_back(p);
        out.peak_positions.push_back(p.position);
    }
    if (out.peaks.size() == 1) {
        const auto top = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
        out.fwhm = half_width(top, 0.5);
    }
    return out;
}

}  // namespace pbglaser

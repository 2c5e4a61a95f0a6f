// liouvillian.hpp: the secular master equation of the dressed atom and the
// cavity mode, as a sparse superoperator on the truncated space
// {|1~>, |2~>} x {|0>, ..., |N>}.
//
// Basis states are ordered (atom, photon) lexicographically with atom index
// 0 = |1~> (upper lasing state) and 1 = |2~>. Density matrices are
// vectorized column-major, matching Eigen's storage order.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pbglaser/dressed.hpp"

namespace pbglaser {

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx>;
using DensityMatrix = Eigen::MatrixXcd;

struct FockAtomSpace {
    std::size_t n_max = 0;

    std::size_t photons() const { return n_max + 1; }
    std::size_t dim() const { return 2 * (n_max + 1); }
    std::size_t index(std::size_t atom, std::size_t n) const { return atom * photons() + n; }
    /// Excitation number n + [atom == |1~>], conserved by the coherent coupling.
    int excitation(std::size_t state) const;
};

struct LiouvillianOptions {
    /// Upper bound on the estimated storage of the superoperator.
    std::size_t max_bytes = std::size_t{1} << 31;
};

class Liouvillian {
public:
    Liouvillian(const DressedRates& rates, double kappa, std::size_t n_max,
                const LiouvillianOptions& opts = {});

    const FockAtomSpace& space() const { return space_; }
    const SparseOp& matrix() const { return l_; }
    double kappa() const { return kappa_; }
    const DressedRates& rates() const { return rates_; }

    DensityMatrix apply(const DensityMatrix& rho) const;

    /// Gershgorin bound on the spectral radius.
    double spectral_radius_bound() const;

    /// Cavity annihilation operator on the full space.
    const SparseOp& annihilation() const { return a_; }

    /// Invariant subspace of density-matrix entries (i, j) whose excitation
    /// difference e_i - e_j equals `order`.
    struct Sector {
        std::vector<std::size_t> entries;  // vectorized indices i + dim * j
        SparseOp block;                    // L restricted to `entries`
    };
    Sector sector(int order) const;

    /// RK4 propagation of vec(X) under d/dt X = L[X] over time t on the full
    /// space, with the step chosen from the spectral radius bound.
    Eigen::VectorXcd propagate(const Eigen::VectorXcd& x, double t, double step_factor = 0.25) const;

private:
    DressedRates rates_;
    double kappa_;
    FockAtomSpace space_;
    SparseOp a_;
    SparseOp l_;
};

struct SteadyStateOptions {
    double residual_tol = 1e-10;
    double shift_factor = 1e-10;  // shift = -shift_factor * spectral radius bound
    int max_iterations = 50;
    double uniqueness_tol = 1e-8;
};

/// Null vector of L by shifted inverse iteration on the sparse matrix,
/// started from two different pure states to detect a degenerate null space.
DensityMatrix steady_state_density(const Liouvillian& l, const SteadyStateOptions& opts = {});

/// Dense eigendecomposition route, for superoperators of dimension <= 400.
DensityMatrix steady_state_density_dense(const Liouvillian& l);

struct DensityDiagnostics {
    double hermiticity = 0.0;  // max |rho - rho^dag|
    double trace_error = 0.0;  // |Tr rho - 1|
    double min_eigenvalue = 0.0;
    double residual = 0.0;     // max |L[rho]| when a Liouvillian is supplied
};

DensityDiagnostics diagnose(const DensityMatrix& rho, const Liouvillian* l = nullptr);

/// Photon-number distribution Tr_atom(rho).
std::vector<double> photon_distribution(const DensityMatrix& rho, const FockAtomSpace& space);

struct DressedPopulations {
    double p1 = 0.0;  // population of |1~>
    double p2 = 0.0;  // population of |2~>
};

DressedPopulations dressed_populations(const DensityMatrix& rho, const FockAtomSpace& space);

struct CorrelationOptions {
    double step_factor = 0.25;     // RK4 substep * spectral radius bound
    double horizon_ratio = 1e-3;   // |g(T)|/|g(0)| above which the horizon is too short
};

struct Correlation {
    std::vector<double> tau;
    std::vector<cplx> g;
    double horizon_ratio = 0.0;
    bool decayed = true;
};

/// g(tau) = Tr(a^dag e^{L tau}[a rho_ss]) on a uniform grid starting at 0,
/// propagated in the coherence sector that contains a rho_ss.
Correlation correlation(const Liouvillian& l, const DensityMatrix& rho_ss,
                        std::span<const double> tau_grid, const CorrelationOptions& opts = {});

/// Uniform grid 0, step, ..., horizon.
std::vector<double> uniform_tau_grid(double step, double horizon);

struct SpectrumOptions {
    double peak_floor = 1e-2;  // local maxima below this fraction of the global one are ignored
    double horizon_ratio = 1e-3;
    bool allow_undecayed = false;
};

struct SpectralPeak {
    double position = 0.0;
    double height = 0.0;  // normalized to the global maximum
    std::optional<double> fwhm;
};

struct SpectrumResult {
    std::vector<double> omega;  // detuning from the lasing frequency
    std::vector<double> s;      // normalized to unit peak
    double scale = 0.0;         // raw peak value of 2 Re int e^{i omega tau} g(tau) dtau
    double integral = 0.0;      // raw int S d omega / 2 pi over the grid
    std::optional<double> fwhm;  // only for a single peak
    std::vector<double> peak_positions;
    std::vector<SpectralPeak> peaks;
};

/// Half-line Fourier transform 2 Re int_0^T e^{i omega tau} g(tau) d tau
/// (trapezoid rule) on a uniform omega grid.
SpectrumResult spectrum(std::span<const cplx> g, std::span<const double> tau,
                        std::span<const double> omega, const SpectrumOptions& opts = {});

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

}  // namespace pbglaser

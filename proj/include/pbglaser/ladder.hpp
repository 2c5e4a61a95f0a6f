// ladder.hpp: photon-number ladder of the dressed-atom laser.
//
// The state is the photon-number representation of four Hermitian
// combinations of the dressed-basis density matrix blocks:
//   P1[n] = <n|rho_22 + rho_11|n>   photon-number distribution
//   P2[n] = <n|rho_22 - rho_11|n>   dressed population difference
//   P3[n] = <n|(a^dag rho_12 + rho_21 a)/2|n>
//   P4[n] = <n|(a rho_21 + rho_12 a^dag)/2|n>
// Under the Fock truncation n <= N, P3[0] and P4[N] are structural zeros
// (P3[n] carries a factor sqrt(n), P4[n] equals P3[n+1]).

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pbglaser/banded.hpp"
#include "pbglaser/dressed.hpp"
#include "pbglaser/specfun.hpp"

namespace pbglaser {

struct PhotonLadder {
    std::vector<double> p1, p2, p3, p4;

    std::size_t n_max() const { return p1.empty() ? 0 : p1.size() - 1; }
    double trace() const;

    /// Zero photons with the atom in the lower lasing state |2~>.
    static PhotonLadder ground(std::size_t n_max);
    static PhotonLadder zeros(std::size_t n_max);
};

struct FieldObservables {
    double mean_n = 0.0;
    double mean_n2 = 0.0;
    std::optional<double> fano;      // undefined when mean_n < 1e-12
    std::optional<double> q_mandel;  // fano - 1
};

/// Threshold on <n> below which Fano factor and Q are reported undefined.
inline constexpr double kUndefinedMeanThreshold = 1e-12;

struct LadderOptions {
    double tail_tol = 1e-12;
    bool check_tail = true;  // throw TruncationError when P1[N] >= tail_tol
};

/// Generator of the ladder equations of motion, d x / dt = A x, with x
/// ordered as four consecutive entries (P1, P2, P3, P4) per photon number.
/// Rows of the structural zeros are empty.
BandedMatrix ladder_generator(const DressedRates& rates, double kappa, std::size_t n_max);

/// Unique normalized stationary ladder for Fock truncation n_max.
PhotonLadder steady_state(const DressedRates& rates, double kappa, std::size_t n_max,
                          const LadderOptions& opts = {});

/// max_i |(A x)_i| / (sum_j |A_ij| * max|x|): the residual of a candidate
/// stationary state relative to the scale of each equation.
double steady_state_residual(const DressedRates& rates, double kappa, const PhotonLadder& state);

struct EvolveOptions {
    double tail_tol = 1e-12;
    double trace_tol_per_time = 1e-9;
};

/// Fixed-step RK4 integration of the ladder equations from `state` over
/// [0, t_final]. The start must be consistent (P4[n] == P3[n+1]).
PhotonLadder evolve(const PhotonLadder& state, const DressedRates& rates, double kappa, double dt,
                    double t_final, const EvolveOptions& opts = {});

/// Largest rate that dt must resolve: max(kappa N, w gamma0 + gamma_+ + gamma_- + 2 kappa N, g1 sqrt N).
double ladder_stiffness(const DressedRates& rates, double kappa, std::size_t n_max);

FieldObservables observables(const PhotonLadder& state);
FieldObservables distribution_observables(std::span<const double> p);

enum class Normalization { kummer, direct_sum };

struct AnalyticDistribution {
    std::vector<double> p;  // empty when degenerate
    double alpha = 0.0;     // gamma_+ / (2 kappa)
    double m = 0.0;
    bool degenerate = false;     // g1 == 0: m is infinite, no distribution
    double pump_ratio = 0.0;     // gamma_+ / kappa
    bool pump_dominates = false;  // pump_ratio >= 100, where the closed form is meant to apply
};

/// Closed-form photon distribution P_n ∝ alpha^n m! / (n+m)!.
AnalyticDistribution analytic_distribution(const DressedRates& rates, double kappa, std::size_t n_max,
                                           Normalization norm = Normalization::kummer,
                                           const SeriesControl& ctl = {});

/// Parameter m of the closed-form distribution; +inf when g1 == 0.
double analytic_m(const DressedRates& rates, double kappa);

struct AsymptoticObservables {
    double mean_n = 0.0;  // raw (gamma_+ - gamma_-)/(2 kappa), negative below threshold
    double q = 0.0;       // (gamma_- + kappa)/gamma_+
    bool above_threshold = false;
};

/// Large-pump, good-cavity limit of <n> and Q.
AsymptoticObservables asymptotic_observables(const DressedRates& rates, double kappa);

struct LowPumpObservables {
    double mean_n = 0.0;
    double q = 0.0;
};

/// Low-pump limit with no emission on the lasing transition:
/// <n> = 2 alpha (1 - 2 alpha), Q = -2 alpha / 3.
LowPumpObservables low_pump_observables(double alpha);

inline constexpr std::size_t kDefaultTruncationCap = 20000;

/// Initial guess max(30, ceil(n + 12 sqrt(n + 1))) with n the threshold-law
/// photon number clamped at zero.
std::size_t initial_truncation(const DressedRates& rates, double kappa);

struct AdaptiveSolution {
    PhotonLadder ladder;
    double residual = 0.0;
};

/// Steady state at the smallest doubling of initial_truncation whose tail
/// P1[N] is below tail_tol. Throws ResourceError past hard_cap.
AdaptiveSolution solve_adaptive(const DressedRates& rates, double kappa, double tail_tol = 1e-12,
                                std::size_t hard_cap = kDefaultTruncationCap);

std::size_t choose_truncation(const DressedRates& rates, double kappa, double tail_tol = 1e-12,
                              std::size_t hard_cap = kDefaultTruncationCap);

}  // namespace pbglaser

// dressed.hpp: dressed-state parameterization of a strongly driven two-level
// atom whose reservoir is filtered by a photonic band edge.
//
// All rates are expressed in the same unit as SystemParams::gamma (the bare
// spontaneous emission rate), conventionally gamma = 1.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pbglaser {

/// Coherent drive given by its resonant Rabi frequency and atom-laser detuning.
struct LaserDrive {
    double epsilon = 1.0;
    double delta_a = 0.0;
};

/// Drive given directly by the dimensionless pump parameter cos^4(phi).
struct PumpDrive {
    double cos4phi = 0.0;
};

using Drive = std::variant<LaserDrive, PumpDrive>;

/// Unit-step occupancies of the reservoir at the three dressed-atom
/// transition frequencies: the laser line and the two Rabi sidebands.
struct GapFlags {
    bool u_L = true;      // emission at omega_L
    bool u_minus = true;  // emission at omega_L - 2 Omega (the lasing transition)
    bool u_plus = true;   // emission at omega_L + 2 Omega (the pump)

    bool operator==(const GapFlags&) const = default;
};

/// Short label used in tables, e.g. "no_gap" / "gap" for u_minus = 1 / 0.
std::string gap_label(const GapFlags& gap);

struct SystemParams {
    double gamma = 1.0;
    double kappa = 1e-3;
    double g = 10.0;
    Drive drive = PumpDrive{0.5};
    GapFlags gap{};

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

struct MixAngle {
    double cos2phi;  // cos^2(phi)
    double omega2;   // generalized Rabi frequency 2 Omega
};

/// Rates between the dressed states plus the effective cavity coupling.
struct DressedRates {
    double cos2phi = 0.5;
    std::optional<double> omega2;  // absent for a PumpDrive
    double gamma0 = 0.0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double g1 = 0.0;

    double sin2phi() const { return 1.0 - cos2phi; }
    double cos4phi() const { return cos2phi * cos2phi; }
};

/// Weight of gamma0 in the decay of the dressed-state coherence
/// rho_{12}: d rho_{12}/dt = -(w*gamma0 + gamma_plus + gamma_minus)/2 rho_{12}.
/// Shared by the ladder equations and the full Liouvillian so that the two
/// engines describe the same model.
inline constexpr double kCoherenceDephasingWeight = 4.0;

MixAngle mix_angle(double epsilon, double delta_a);

DressedRates dressed_rates(const SystemParams& params);

/// Uniform grid of pump parameters in [lo, hi]. Every grid point is emitted
/// twice, first with emission on the lasing transition (u_minus = 1) and then
/// without it (u_minus = 0); all other fields come from `base`.
std::vector<SystemParams> pump_sweep_grid(std::size_t n_points, double lo, double hi,
                                          const SystemParams& base);

}  // namespace pbglaser

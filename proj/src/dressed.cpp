#include "pbglaser/dressed.hpp"

#include <cmath>

#include "pbglaser/errors.hpp"

namespace pbglaser {

std::string gap_label(const GapFlags& gap) {
    std::string label = gap.u_minus ? "no_gap" : "gap";
    if (!gap.u_L) label += "_noL";
    if (!gap.u_plus) label += "_noplus";
    return label;
}

void SystemParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be > 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be > 0");
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("g must be >= 0");
    if (const auto* pump = std::get_if<PumpDrive>(&drive)) {
        if (!(pump->cos4phi >= 0.0 && pump->cos4phi <= 1.0))
            throw DomainError("cos4phi must lie in [0, 1]");
    } else {
        const auto& laser = std::get<LaserDrive>(drive);
        if (!(laser.epsilon > 0.0)) throw DomainError("degenerate drive: epsilon must be > 0");
        if (!std::isfinite(laser.delta_a)) throw DomainError("delta_a must be finite");
    }
}

MixAngle mix_angle(double epsilon, double delta_a) {
    if (!(epsilon > 0.0)) throw DomainError("degenerate drive: epsilon must be > 0");
    const double omega2 = std::hypot(2.0 * epsilon, delta_a);
    double c2 = 0.5 * (1.0 + delta_a / omega2);
    // |delta_a| <= omega2, but guard the last ulp
    c2 = std::fmin(1.0, std::fmax(0.0, c2));
    return {c2, omega2};
}

DressedRates dressed_rates(const SystemParams& params) {
    params.validate();
    DressedRates r;
    if (const auto* pump = std::get_if<PumpDrive>(&params.drive)) {
        r.cos2phi = std::sqrt(pump->cos4phi);
    } else {
        const auto& laser = std::get<LaserDrive>(params.drive);
        const MixAngle m = mix_angle(laser.epsilon, laser.delta_a);
        r.cos2phi = m.cos2phi;
        r.omega2 = m.omega2;
    }
    const double c2 = r.cos2phi;
    const double s2 = r.sin2phi();
    const double sin2_2phi = 4.0 * c2 * s2;
    r.gamma0 = params.gap.u_L ? params.gamma * sin2_2phi : 0.0;
    r.gamma_plus = params.gap.u_plus ? params.gamma * c2 * c2 : 0.0;
    r.gamma_minus = params.gap.u_minus ? params.gamma * s2 * s2 : 0.0;
    r.g1 = params.g * s2;
    return r;
}

std::vector<SystemParams> pump_sweep_grid(std::size_t n_points, double lo, double hi,
                                          const SystemParams& base) {
    if (n_points < 2) throw DomainError("sweep needs at least two points");
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
        throw DomainError("sweep range must satisfy 0 <= lo < hi <= 1");

    std::vector<SystemParams> grid;
    grid.reserve(2 * n_points);
    const double span = hi - lo;
    const double last = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        // i == n-1 must land exactly on hi
        const double x = (i + 1 == n_points) ? hi : lo + span * static_cast<double>(i) / last;
        for (const bool emission : {true, false}) {
            SystemParams p = base;
            p.drive = PumpDrive{x};
            p.gap.u_minus = emission;
            grid.push_back(p);
        }
    }
    return grid;
}

}  // namespace pbglaser

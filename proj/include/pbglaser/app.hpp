// app.hpp: the run modes behind the sim command-line tool.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbglaser/config.hpp"
#include "pbglaser/ladder.hpp"
#include "pbglaser/liouvillian.hpp"

namespace pbglaser {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitSolver = 2, kExitValidation = 3 };

/// Real number with 17 significant digits, independent of locale.
std::string format_real(double v);

struct PointSolution {
    PhotonLadder ladder;
    FieldObservables obs;
    double residual = 0.0;
};

/// Stationary ladder at a fixed truncation (solver.n_override) or at the
/// adaptive one.
PointSolution solve_point(const DressedRates& rates, double kappa, const SolverSettings& solver);

struct SweepRecord {
    double cos4phi = 0.0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double gamma0 = 0.0;
    double g1 = 0.0;
    double mean_n = 0.0;
    std::optional<double> q_mandel;
    std::size_t n_used = 0;
    double residual = 0.0;
    std::string gap_config_label;
    std::string error;  // empty on success
    double seconds = 0.0;

    bool ok() const { return error.empty(); }
};

/// Solves every point on a bounded pool of `threads` workers. Records come
/// back in input order; failures are recorded, never thrown.
std::vector<SweepRecord> compute_sweep(const std::vector<SystemParams>& points, const SolverSettings& solver,
                                       std::size_t threads);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
nlohmann::json sweep_records_json(const std::vector<SweepRecord>& records, bool with_timing);

struct PanelResult {
    std::string label;
    SystemParams params;
    DressedRates rates;
    std::size_t n_used = 0;
    double mean_n = 0.0;
    double tau_step = 0.0;
    double horizon = 0.0;
    double horizon_ratio = 0.0;
    std::string grid;
    SpectrumResult spectrum;
    Correlation correlation;
    double seconds = 0.0;
};

/// Default frequency step of the correlation samples: 16 per period of the
/// fastest relevant frequency.
double default_tau_step(const DressedRates& rates, double mean_n, double omega_absmax);

/// Computes the spectrum of one panel; `g1_max` sets the doublet grid.
PanelResult compute_panel(const SystemParams& params, const SpectrumSettings& settings, const SpectrumPanel& panel,
                          const SolverSettings& solver, double g1_max);

/// System parameters of each configured panel (the run's params when there
/// are no panels).
std::vector<std::pair<std::string, SystemParams>> expand_panels(const RunConfig& config);

std::string sweep_plot_script(const std::string& csv_path);
std::string spectrum_plot_script(const std::string& csv_path, const std::vector<std::string>& labels);
std::string dist_plot_script(const std::string& csv_path);

int run_sweep(const RunConfig& config, std::ostream& log);
int run_spectrum(const RunConfig& config, std::ostream& log);
int run_dist(const RunConfig& config, std::ostream& log);
int run_validate(const RunConfig& config, std::ostream& log);
int run(const RunConfig& config, std::ostream& log);

}  // namespace pbglaser

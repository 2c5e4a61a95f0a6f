// config.hpp: run configuration for the sim front end, read from a JSON
// file with nested tables; command-line flags override file values.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbglaser/dressed.hpp"

namespace pbglaser {

enum class Mode { sweep, spectrum, dist, validate };
enum class OutputFormat { csv, json };

std::string to_string(Mode m);
std::string to_string(OutputFormat f);

struct SweepSettings {
    std::size_t points = 101;
    double lo = 0.0;  // range of cos^4(phi)
    double hi = 1.0;
};

/// One spectrum to compute. Fields left empty fall back to the run's params
/// and to automatic choices.
struct SpectrumPanel {
    std::string label;
    std::optional<double> delta_a;
    std::optional<double> horizon;
};

enum class OmegaGrid { automatic, doublet, zoom, manual };

struct SpectrumSettings {
    std::vector<SpectrumPanel> panels;
    double horizon = 5000.0;
    std::optional<double> tau_step;  // automatic when absent
    std::size_t omega_points = 4001;
    OmegaGrid grid = OmegaGrid::automatic;
    double omega_lo = -1.0;  // only for OmegaGrid::manual
    double omega_hi = 1.0;
    bool allow_undecayed = false;
};

struct SolverSettings {
    std::optional<std::size_t> n_override;
    double tail_tol = 1e-12;
    double rel_tol = 1e-14;
};

struct OutputSettings {
    std::string path;  // empty: standard output
    OutputFormat format = OutputFormat::csv;
    bool emit_plot_script = false;
};

struct RunConfig {
    Mode mode = Mode::sweep;
    SystemParams params;
    SweepSettings sweep;
    SpectrumSettings spectrum;
    SolverSettings solver;
    OutputSettings output;
    std::size_t threads = 1;

    /// Throws DomainError if a mode-specific field is missing or invalid.
    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

nlohmann::json params_to_json(const SystemParams& p);
SystemParams params_from_json(const nlohmann::json& j);

}  // namespace pbglaser

// checks.hpp: the validation suite shared by `sim validate` and the
// acceptance test. Every check reports what it measured against which
// tolerance; nothing here throws for a failed comparison.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbglaser/config.hpp"

namespace pbglaser {

struct Measurement {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string relation;  // how value is compared with tolerance, e.g. "<=" or ">="
};

struct CheckResult {
    std::string id;
    std::string title;
    std::vector<Measurement> measurements;
    std::vector<std::string> notes;  // informational, never affects the verdict
    double seconds = 0.0;
    std::string error;  // set when the check itself could not run

    bool passed() const;
    nlohmann::json to_json() const;
};

struct ValidationOptions {
    std::size_t threads = 1;
    std::size_t sweep_points = 101;
    unsigned seed = 20240607;
    SolverSettings solver;  // n_override, when set, feeds the truncation check
};

CheckResult check_threshold_location(const ValidationOptions& opts);
CheckResult check_thresholdless_linearity(const ValidationOptions& opts);
CheckResult check_statistics_signatures(const ValidationOptions& opts);
CheckResult check_low_pump_regime(const ValidationOptions& opts);
CheckResult check_analytic_distribution(const ValidationOptions& opts);
CheckResult check_oracle_equivalence(const ValidationOptions& opts);
CheckResult check_spectrum_below_threshold(const ValidationOptions& opts);
CheckResult check_spectrum_above_threshold(const ValidationOptions& opts);
CheckResult check_properties(const ValidationOptions& opts);
/// Solves a reference point at solver.n_override and fails if the tail
/// P_N is not below solver.tail_tol. Skipped (passes) without an override.
CheckResult check_truncation(const ValidationOptions& opts);

std::vector<CheckResult> run_validation_suite(const ValidationOptions& opts);

}  // namespace pbglaser

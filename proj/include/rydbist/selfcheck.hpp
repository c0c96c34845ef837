// Analytic-oracle suite behind `rydbist selfcheck`.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rydbist {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

/// Default tolerance of every check, keyed by check name.
std::map<std::string, double> default_selfcheck_tolerances();

/// Applies a RYDBIST_TOL value: a bare number replaces every tolerance;
/// otherwise a comma-separated list of name=value pairs replaces the named
/// ones. Throws std::invalid_argument on unknown names or bad numbers.
std::map<std::string, double> apply_tolerance_override(std::map<std::string, double> tolerances,
                                                       const std::string& spec);

/// Runs every check. `tol_override` is the RYDBIST_TOL value, if any.
std::vector<CheckResult> run_selfcheck(const std::optional<std::string>& tol_override = std::nullopt);

} // namespace rydbist

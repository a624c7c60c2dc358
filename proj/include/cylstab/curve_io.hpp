#pragma once

#include <string>

#include "cylstab/curve.hpp"

namespace cylstab {

/// Curve CSV: '#' metadata lines (a, b, k, n, L, n_samples, closure_residual),
/// a header row `s,x1,x2,theta,kappa`, then one row per sample with 17
/// significant digits (round-trips doubles exactly). No duplicated endpoint.
void write_curve_csv(const PlanarCurve& curve, const std::string& path);

/// Parse and validate a curve file; throws InvalidArgument on malformed
/// input and InvariantViolation (naming the invariant) on bad geometry.
PlanarCurve read_curve_csv(const std::string& path, const SolverConfig& config);

}  // namespace cylstab

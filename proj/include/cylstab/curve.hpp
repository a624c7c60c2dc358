#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cylstab/common.hpp"

namespace cylstab {

/// Coefficients of the curvature law kappa = a r^2 + b together with the
/// dihedral symmetry class of the sought closed curve.
struct GeneratingParams {
    double a{0.0};          // rotation strength, units 1/length^3
    double b{0.0};          // curvature offset, units 1/length
    int symmetry_order{1};  // k-fold dihedral symmetry
    int rotation_index{1};  // total turning / 2pi
};

void validate_params(const GeneratingParams& params);

/// Closed generating curve, uniformly sampled in arc length.
/// Samples sit at s_i = i L / n_samples, i = 0 .. n_samples-1; there is no
/// duplicated endpoint row. theta is a continuous lift of the tangent angle.
struct PlanarCurve {
    GeneratingParams params;
    int n_samples{0};
    double length{0.0};
    std::vector<Vec2> points;
    std::vector<double> theta;
    std::vector<double> kappa;
    double closure_residual{0.0};
};

/// Integral quantities of a closed curve consumed by the stability bounds.
struct CurveScalars {
    double length{0.0};              // L
    double area{0.0};                // |Omega|, signed, positive for CCW
    double total_sq_curvature{0.0};  // integral of kappa^2 ds
    double moment{0.0};              // integral of <alpha x alpha', E3> ds
};

/// One state of the generating-curve ODE. phi is the continuous lift of the
/// position angle atan2(x2, x1).
struct ArcState {
    double s{0.0};
    double x1{0.0};
    double x2{0.0};
    double theta{0.0};
    double phi{0.0};
};

/// Open arc produced by integrate_arc: dense RK4 samples plus the state at
/// the first crossing of the symmetry line phi = pi / symmetry_order.
struct OpenArc {
    std::vector<ArcState> states;
    std::optional<ArcState> event;
};

/// Exact circle of radius r centered at the origin, sampled analytically.
/// b is forced to 1/r - a r^2 so the curvature law holds identically.
PlanarCurve circle_curve(double r, double a, int n_samples);

/// Integrate x1' = cos(theta), x2' = sin(theta), theta' = a r^2 + b from
/// alpha(0) = (start_radius, 0), theta(0) = pi/2 with fixed-step RK4 until
/// the symmetry-line event or max_arclength. Throws NumericFailure on
/// escape, step underflow, or when the event is never reached.
OpenArc integrate_arc(const GeneratingParams& params, double start_radius, double max_arclength,
                      const SolverConfig& config);

/// Signed shooting residual F(r0): angle between the arc tangent at the
/// symmetry-line crossing and the line normal. Zero means the reflected
/// assembly closes with a C1 junction.
double shooting_residual(const GeneratingParams& params, double r0, const SolverConfig& config);

/// Find r0 in the bracket with F(r0) = 0 (bisection then secant), assemble
/// the closed curve by reflecting the fundamental arc across the symmetry
/// lines and rotating, resample to uniform arc length, and validate.
PlanarCurve shoot_closed_curve(const GeneratingParams& params, std::pair<double, double> r0_bracket,
                               const SolverConfig& config);

/// L, |Omega|, total squared curvature and the rotation moment by the
/// periodic trapezoid rule. Throws on non-positive signed area.
CurveScalars curve_scalars(const PlanarCurve& curve);

/// Reduced potential q(s_i) = kappa^2 + 2a <alpha x alpha', E3>.
std::vector<double> q_profile(const PlanarCurve& curve);

/// Rotational Jacobi field psi(s_i) = <alpha, alpha'>.
std::vector<double> rotation_field(const PlanarCurve& curve);

/// Tangent components g1 = cos(theta), g2 = sin(theta).
std::pair<std::vector<double>, std::vector<double>> tangent_components(const PlanarCurve& curve);

/// Check all PlanarCurve invariants; throws InvariantViolation naming the
/// first violated one (arc_spacing, closure, orientation, curvature_law,
/// turning).
void validate_curve(const PlanarCurve& curve, const SolverConfig& config);

/// True when no two non-adjacent polygon segments of the sample loop cross.
bool is_embedded(const PlanarCurve& curve);

}  // namespace cylstab

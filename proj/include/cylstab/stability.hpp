#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cylstab/curve.hpp"

namespace cylstab {

struct CylinderColumn {
    PlanarCurve curve;
    double column_length{0.0};  // l
};

/// Separated axial mode m: f_m(t) = sin(m pi t / l). Odd modes carry the
/// zero-mean constraint into the s-problem; even modes do not.
struct ModeAnalysis {
    int mode_index{0};
    bool constrained{false};
    double eigenvalue{0.0};
    double threshold_length{kInfinity};  // m pi / sqrt(-lambda) when lambda < 0
};

enum class BoundComparison { Theorem1Stronger, Theorem2Stronger, Tie };

/// Discrete eigenvalues within this band of zero are treated as marginal
/// when converted to length thresholds; exactly-neutral modes land a few
/// O(h^2) units below zero on any finite grid.
constexpr double kEigZeroBand = 1e-4;

enum class Verdict { Stable, Unstable, Marginal };

std::string to_string(Verdict v);

struct StabilityReport {
    CurveScalars scalars;
    GeneratingParams params;
    std::optional<double> theorem1;        // nullopt = not applicable
    std::optional<double> theorem2;
    std::string stronger_bound;            // "theorem1" | "theorem2" | "tie" | "n/a"
    std::vector<ModeAnalysis> modes;
    double per_mode_critical{kInfinity};
    std::optional<double> oracle_critical; // nullopt = not computed
    std::optional<Verdict> verdict;        // only when a length was queried
    std::optional<double> margin;          // signed relative distance to critical
};

/// Necessary stability bound l <= (pi/2) sqrt(L / (a |Omega|)); requires a > 0.
std::optional<double> theorem1_bound(const CurveScalars& scalars, double a);

/// Necessary stability bound l <= 2 pi sqrt(L / (4 a |Omega| + L b^2));
/// requires a >= 0 and b > 0.
std::optional<double> theorem2_bound(const CurveScalars& scalars, double a, double b);

/// Which applicable bound is numerically smaller; cross-checked against the
/// sign of a/b^2 - L/(12 |Omega|).
BoundComparison bound_comparison(const CurveScalars& scalars, double a, double b);

ModeAnalysis mode_threshold(const PlanarCurve& curve, int m, int n_grid);

/// Minimum mode threshold over m = 1..m_max; governing mode reported on
/// request.
double per_mode_critical_length(const PlanarCurve& curve, int m_max, int n_grid,
                                int* governing_mode = nullptr);

/// Second-variation quadratic form in gradient (integrated-by-parts) form,
/// evaluated on a (n_t+1) x n_s grid sample of u. Rows 0 and n_t are the
/// Dirichlet boundary and must vanish; columns are periodic in s.
double phi_evaluate(const CylinderColumn& column, const Eigen::MatrixXd& u);

/// Phi(u_1), Phi(u_2) for the proof test functions u_i = sin(pi t/l) g_i(s).
std::pair<double, double> proof_witness(const CylinderColumn& column, int n_t, int n_s);

struct FullFormDiagnostics {
    double value{0.0};
    double coarse_value{0.0};
    double richardson_error{0.0};
    bool resolution_warning{false};
};

/// Smallest eigenvalue of the full 2D operator -Laplace - q(s) on
/// [0,l] x [0,L] (Dirichlet in t, periodic in s) restricted to the
/// zero-sum hyperplane. Negative means the column of length l is unstable.
double full_form_min(const CylinderColumn& column, int n_t, int n_s,
                     FullFormDiagnostics* diagnostics = nullptr);

/// Bisection on l for the sign change of full_form_min, to the relative
/// tolerance config.bisection_tol; +infinity when the column never goes
/// unstable below config.l_max.
double oracle_critical_length(const PlanarCurve& curve, const SolverConfig& config);

/// Full analysis: bounds, per-mode thresholds, 2D oracle, verdict at l.
StabilityReport build_report(const PlanarCurve& curve, std::optional<double> l,
                             const SolverConfig& config, bool compute_oracle = true);

}  // namespace cylstab

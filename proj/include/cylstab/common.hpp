#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace cylstab {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Bad arguments or malformed input files. CLI exit code 1.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to produce a result (no sign change,
/// no convergence, escape from the integration domain). CLI exit code 2.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(std::string kind, const std::string& detail)
        : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

/// A constructed or loaded object violates one of its documented
/// invariants; the message names the invariant. CLI exit code 3.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string invariant, const std::string& detail)
        : std::runtime_error("invariant '" + invariant + "' violated: " + detail),
          invariant_(std::move(invariant)) {}
    const std::string& invariant() const { return invariant_; }

private:
    std::string invariant_;
};

struct Vec2 {
    double x{0.0};
    double y{0.0};
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Numerical knobs shared by the curve, spectral and stability layers.
/// All algorithms are deterministic; there is no seed anywhere.
struct SolverConfig {
    // Curve construction.
    double h_ode = 1e-3;          // upper cap on the RK4 step
    double closure_tol = 1e-8;    // |alpha(L) - alpha(0)|
    double law_tol = 1e-6;        // max |kappa - (a r^2 + b)|
    double shoot_tol = 1e-10;     // angle residual at the symmetry line
    int n_samples = 512;          // uniform samples of an assembled curve
    double escape_radius = 100.0; // integration aborts beyond this radius
    double max_arclength = 200.0; // default cap for the fundamental arc

    // Spectral discretization.
    int n_grid = 512;             // 1D periodic grid for the s-operator

    // Full 2D quadratic-form oracle.
    int n_t = 64;                 // axial subdivisions (Dirichlet rows at 0 and l)
    int n_s = 256;                // periodic s subdivisions
    int m_max = 8;                // axial modes scanned per report
    double bisection_tol = 1e-3;  // relative tolerance on the critical length
    double l_max = 50.0;          // give up the critical-length scan beyond this
};

}  // namespace cylstab

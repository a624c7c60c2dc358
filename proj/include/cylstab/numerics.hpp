#pragma once

#include <cstddef>
#include <vector>

namespace cylstab {

/// Wrap an angle to (-pi, pi].
double wrap_to_pi(double angle);

/// Periodic trapezoid rule on a uniform grid: h * sum(values).
/// Spectrally accurate for smooth periodic integrands.
double trapezoid_periodic(double h, const std::vector<double>& values);

/// Central difference derivative of a periodic sequence on a uniform grid.
std::vector<double> periodic_central_derivative(double h, const std::vector<double>& values);

/// C2 periodic cubic spline through n uniformly spaced samples on [0, period).
/// Sample i sits at s_i = i * period / n; evaluation wraps periodically.
class PeriodicCubicSpline {
public:
    PeriodicCubicSpline(double period, std::vector<double> values);

    double operator()(double s) const;

    /// Resample onto a uniform grid of m points (s_j = j * period / m).
    std::vector<double> resample(int m) const;

    double period() const { return period_; }

private:
    double period_;
    double h_;
    std::vector<double> y_;
    std::vector<double> second_;  // spline second derivatives at the nodes
};

/// Cubic Hermite value on [s0, s1] from endpoint values and derivatives.
double hermite_value(double s, double s0, double s1, double p0, double p1, double d0, double d1);

/// Derivative of the cubic Hermite interpolant at s.
double hermite_derivative(double s, double s0, double s1, double p0, double p1, double d0,
                          double d1);

}  // namespace cylstab

#include "cylstab/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "cylstab/common.hpp"

namespace cylstab {

double wrap_to_pi(double angle) {
    const double two_pi = 2.0 * M_PI;
    double w = std::remainder(angle, two_pi);
    if (w <= -M_PI) w += two_pi;
    return w;
}

double trapezoid_periodic(double h, const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return h * sum;
}

std::vector<double> periodic_central_derivative(double h, const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 3) throw InvalidArgument("periodic_central_derivative: need at least 3 samples");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = (i + 1) % n;
        const std::size_t im = (i + n - 1) % n;
        d[i] = (values[ip] - values[im]) / (2.0 * h);
    }
    return d;
}

PeriodicCubicSpline::PeriodicCubicSpline(double period, std::vector<double> values)
    : period_(period), y_(std::move(values)) {
    const int n = static_cast<int>(y_.size());
    if (n < 4) throw InvalidArgument("PeriodicCubicSpline: need at least 4 samples");
    if (!(period > 0.0)) throw InvalidArgument("PeriodicCubicSpline: period must be positive");
    h_ = period_ / n;

    // Natural periodic spline: solve the cyclic tridiagonal system
    //   (h/6) M_{i-1} + (2h/3) M_i + (h/6) M_{i+1} = (y_{i+1} - 2 y_i + y_{i-1}) / h
    // for the second derivatives M_i, indices mod n. The cyclic corner is
    // removed with the Sherman-Morrison correction.
    const double a = h_ / 6.0;       // off-diagonal
    const double b = 2.0 * h_ / 3.0; // diagonal
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n;
        const int im = (i + n - 1) % n;
        rhs[i] = (y_[ip] - 2.0 * y_[i] + y_[im]) / h_;
    }

    auto solve_tridiag = [&](std::vector<double> r, double d0, double dn) {
        // Thomas algorithm with modified first/last diagonal entries.
        std::vector<double> c(n), x(n);
        double beta = d0;
        x[0] = r[0] / beta;
        for (int i = 1; i < n; ++i) {
            c[i] = a / beta;
            beta = (i == n - 1 ? dn : b) - a * c[i];
            x[i] = (r[i] - a * x[i - 1]) / beta;
        }
        for (int i = n - 2; i >= 0; --i) x[i] -= c[i + 1] * x[i + 1];
        return x;
    };

    // Sherman-Morrison: A_cyclic = A_tri + u v^T with u = (gamma, 0...0, a)^T,
    // v = (1, 0...0, a/gamma)^T; choose gamma = -b.
    const double gamma = -b;
    const double d0 = b - gamma;
    const double dn = b - a * a / gamma;

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = a;

    std::vector<double> z = solve_tridiag(rhs, d0, dn);
    std::vector<double> q = solve_tridiag(u, d0, dn);

    const double vz = z[0] + (a / gamma) * z[n - 1];
    const double vq = 1.0 + q[0] + (a / gamma) * q[n - 1];
    second_.resize(n);
    for (int i = 0; i < n; ++i) second_[i] = z[i] - q[i] * (vz / vq);
}

double PeriodicCubicSpline::operator()(double s) const {
    const int n = static_cast<int>(y_.size());
    double t = std::fmod(s, period_);
    if (t < 0.0) t += period_;
    int i = static_cast<int>(t / h_);
    if (i >= n) i = n - 1;
    const int ip = (i + 1) % n;
    const double sl = t - i * h_;
    const double sr = h_ - sl;
    // Standard cubic spline segment formula in terms of node second derivatives.
    return (second_[i] * sr * sr * sr + second_[ip] * sl * sl * sl) / (6.0 * h_) +
           (y_[i] / h_ - second_[i] * h_ / 6.0) * sr + (y_[ip] / h_ - second_[ip] * h_ / 6.0) * sl;
}

std::vector<double> PeriodicCubicSpline::resample(int m) const {
    if (m < 1) throw InvalidArgument("PeriodicCubicSpline::resample: m must be positive");
    const int n = static_cast<int>(y_.size());
    std::vector<double> out(m);
    if (m == n) {
        for (int j = 0; j < m; ++j) out[j] = y_[j];
        return out;
    }
    for (int j = 0; j < m; ++j) out[j] = (*this)(period_ * j / m);
    return out;
}

double hermite_value(double s, double s0, double s1, double p0, double p1, double d0, double d1) {
    const double h = s1 - s0;
    const double t = (s - s0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * h * d0 +
           (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * h * d1;
}

double hermite_derivative(double s, double s0, double s1, double p0, double p1, double d0,
                          double d1) {
    const double h = s1 - s0;
    const double t = (s - s0) / h;
    const double t2 = t * t;
    return ((6.0 * t2 - 6.0 * t) * p0 + (3.0 * t2 - 4.0 * t + 1.0) * h * d0 +
            (-6.0 * t2 + 6.0 * t) * p1 + (3.0 * t2 - 2.0 * t) * h * d1) /
           h;
}

}  // namespace cylstab

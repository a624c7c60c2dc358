#include "cylstab/stability.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cylstab/numerics.hpp"
#include "cylstab/spectral.hpp"

namespace cylstab {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::vector<double> resample_potential(const PlanarCurve& curve, int n) {
    std::vector<double> q = q_profile(curve);
    if (n == curve.n_samples) return q;
    return PeriodicCubicSpline(curve.length, std::move(q)).resample(n);
}

/// Sparse 2D operator -D_t^2 - D_s^2 - diag(q(s)) on the interior rows
/// t_j = j l / n_t, j = 1..n_t-1, periodic in s.
Eigen::SparseMatrix<double> assemble_2d_operator(double l, double period,
                                                 const std::vector<double>& q, int n_t) {
    const int n_s = static_cast<int>(q.size());
    const int rows_t = n_t - 1;
    const int size = rows_t * n_s;
    const double wt = 1.0 / ((l / n_t) * (l / n_t));
    const double ws = 1.0 / ((period / n_s) * (period / n_s));

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(size) * 5);
    for (int j = 0; j < rows_t; ++j) {
        for (int i = 0; i < n_s; ++i) {
            const int row = j * n_s + i;
            trip.emplace_back(row, row, 2.0 * wt + 2.0 * ws - q[i]);
            if (j > 0) trip.emplace_back(row, row - n_s, -wt);
            if (j < rows_t - 1) trip.emplace_back(row, row + n_s, -wt);
            trip.emplace_back(row, j * n_s + (i + 1) % n_s, -ws);
            trip.emplace_back(row, j * n_s + (i + n_s - 1) % n_s, -ws);
        }
    }
    Eigen::SparseMatrix<double> m(size, size);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

/// Smallest eigenvalue of the operator restricted to the zero-sum
/// hyperplane, by shift-invert Lanczos. The shift sigma = -max(q) - 1 makes
/// M - sigma I positive definite; the constraint enters through the
/// bordered solve w = K^{-1} v - mu K^{-1} e with e^T w = 0.
double projected_min_eigenvalue_2d(const Eigen::SparseMatrix<double>& op, double sigma) {
    const int n = static_cast<int>(op.rows());

    Eigen::SparseMatrix<double> shifted = op;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(shifted);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("no_convergence", "sparse LDLT factorization failed");
    }

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd z = solver.solve(ones);
    const double delta = ones.dot(z);

    auto apply_inverse = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd w = solver.solve(v);
        w -= (ones.dot(w) / delta) * z;
        return w;
    };
    auto project = [&](Eigen::VectorXd& v) { v -= (ones.dot(v) / n) * ones; };

    // Deterministic start vector with no grid symmetry.
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::sin(0.7 * i + 0.3) + 0.5 * std::cos(1.3 * i + 0.2);
    project(v);
    v.normalize();

    const int max_iter = std::min(n, 400);
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    basis.push_back(v);

    double theta_max = 0.0;
    double theta_prev = 0.0;
    int stagnant = 0;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXd w = apply_inverse(basis[j]);
        const double a = basis[j].dot(w);
        alpha.push_back(a);
        w -= a * basis[j];
        if (j > 0) w -= beta[j - 1] * basis[j - 1];
        for (const auto& u : basis) w -= u.dot(w) * u;  // full reorthogonalization
        project(w);
        const double b = w.norm();

        const int m = j + 1;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) {
                t(i, i + 1) = beta[i];
                t(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
        theta_max = small.eigenvalues()(m - 1);
        const double residual = b * std::abs(small.eigenvectors()(m - 1, m - 1));
        if (residual <= 1e-11 * std::max(1.0, theta_max)) break;
        if (std::abs(theta_max - theta_prev) <= 1e-14 * std::max(1.0, theta_max)) {
            if (++stagnant >= 5) break;
        } else {
            stagnant = 0;
        }
        theta_prev = theta_max;

        if (b < 1e-13) break;  // Krylov space exhausted
        if (j + 1 == max_iter) {
            throw NumericFailure("no_convergence", "Lanczos iteration cap reached");
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }
    if (!(theta_max > 0.0)) {
        throw NumericFailure("no_convergence", "shift-invert produced a non-positive Ritz value");
    }
    return sigma + 1.0 / theta_max;
}

double min_eigenvalue_2d(const PlanarCurve& curve, double l, int n_t, int n_s) {
    const std::vector<double> q = resample_potential(curve, n_s);
    const double sigma = -(*std::max_element(q.begin(), q.end())) - 1.0;
    return projected_min_eigenvalue_2d(assemble_2d_operator(l, curve.length, q, n_t), sigma);
}

double threshold_from_eigenvalue(int m, double lambda) {
    if (lambda < -kEigZeroBand) return m * M_PI / std::sqrt(-lambda);
    return kInfinity;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Marginal: return "marginal";
    }
    return "unknown";
}

std::optional<double> theorem1_bound(const CurveScalars& scalars, double a) {
    if (!(a > 0.0)) return std::nullopt;
    return 0.5 * M_PI * std::sqrt(scalars.length / (a * scalars.area));
}

std::optional<double> theorem2_bound(const CurveScalars& scalars, double a, double b) {
    if (a < 0.0 || !(b > 0.0)) return std::nullopt;
    return 2.0 * M_PI *
           std::sqrt(scalars.length / (4.0 * a * scalars.area + scalars.length * b * b));
}

BoundComparison bound_comparison(const CurveScalars& scalars, double a, double b) {
    const auto th1 = theorem1_bound(scalars, a);
    const auto th2 = theorem2_bound(scalars, a, b);
    if (!th1 || !th2) {
        throw InvalidArgument("bound_comparison: both bounds must be applicable (a > 0, b > 0)");
    }
    const double predictor = a / (b * b) - scalars.length / (12.0 * scalars.area);
    const double diff = *th1 - *th2;
    if (std::abs(diff) <= 1e-10 * std::max(1.0, *th1)) {
        if (std::abs(predictor) > 1e-8 * std::max(1.0, a / (b * b))) {
            throw InvariantViolation("crossover", "bounds tie but a/b^2 - L/(12|Omega|) = " +
                                                      fmt(predictor));
        }
        return BoundComparison::Tie;
    }
    const BoundComparison result =
        diff > 0.0 ? BoundComparison::Theorem2Stronger : BoundComparison::Theorem1Stronger;
    // Theorem 2 is stronger exactly when a/b^2 < L/(12|Omega|).
    const bool predicted_th2 = predictor < 0.0;
    if (predicted_th2 != (result == BoundComparison::Theorem2Stronger)) {
        throw InvariantViolation("crossover", "bound ordering disagrees with the sign of "
                                              "a/b^2 - L/(12|Omega|)");
    }
    return result;
}

ModeAnalysis mode_threshold(const PlanarCurve& curve, int m, int n_grid) {
    if (m < 1) throw InvalidArgument("mode_threshold: mode index must be >= 1");
    const SLOperator op = assemble_sl_operator(curve, n_grid);
    ModeAnalysis mode;
    mode.mode_index = m;
    mode.constrained = (m % 2 == 1);
    mode.eigenvalue =
        mode.constrained ? constrained_min_eigenvalue(op) : eigen_spectrum(op, 1).eigenvalues[0];
    mode.threshold_length = threshold_from_eigenvalue(m, mode.eigenvalue);
    return mode;
}

double per_mode_critical_length(const PlanarCurve& curve, int m_max, int n_grid,
                                int* governing_mode) {
    if (m_max < 2) throw InvalidArgument("per_mode_critical_length: m_max >= 2 required");
    const SLOperator op = assemble_sl_operator(curve, n_grid);
    const double lambda_odd = constrained_min_eigenvalue(op);
    const double lambda_even = eigen_spectrum(op, 1).eigenvalues[0];

    double best = kInfinity;
    int gov = 0;
    for (int m = 1; m <= m_max; ++m) {
        const double th = threshold_from_eigenvalue(m, (m % 2 == 1) ? lambda_odd : lambda_even);
        if (th < best) {
            best = th;
            gov = m;
        }
    }
    if (gov > 4) {
        throw InvariantViolation("mode_governance",
                                 "mode " + std::to_string(gov) + " governs; thresholds should "
                                 "grow with m once the parity eigenvalues stabilize");
    }
    if (governing_mode) *governing_mode = gov;
    return best;
}

double phi_evaluate(const CylinderColumn& column, const Eigen::MatrixXd& u) {
    const int n_t = static_cast<int>(u.rows()) - 1;
    const int n_s = static_cast<int>(u.cols());
    if (n_t < 2 || n_s < 4) throw InvalidArgument("phi_evaluate: grid too small");
    const double l = column.column_length;
    if (!(l > 0.0)) throw InvalidArgument("phi_evaluate: column length must be positive");

    const double scale = u.cwiseAbs().maxCoeff();
    const double boundary =
        std::max(u.row(0).cwiseAbs().maxCoeff(), u.row(n_t).cwiseAbs().maxCoeff());
    if (boundary > 1e-9 * (1.0 + scale)) {
        throw InvalidArgument("phi_evaluate: nonzero boundary rows (u must vanish at t = 0, l)");
    }

    const std::vector<double> q = resample_potential(column.curve, n_s);
    const double ht = l / n_t;
    const double hs = column.curve.length / n_s;

    auto val = [&](int j, int i) { return (j == 0 || j == n_t) ? 0.0 : u(j, i); };

    double grad_t = 0.0, grad_s = 0.0, pot = 0.0;
    for (int j = 0; j < n_t; ++j) {
        for (int i = 0; i < n_s; ++i) {
            const double d = (val(j + 1, i) - val(j, i)) / ht;
            grad_t += d * d;
        }
    }
    for (int j = 1; j < n_t; ++j) {
        for (int i = 0; i < n_s; ++i) {
            const double d = (val(j, (i + 1) % n_s) - val(j, i)) / hs;
            grad_s += d * d;
            pot += q[i] * val(j, i) * val(j, i);
        }
    }
    return ht * hs * (grad_t + grad_s - pot);
}

std::pair<double, double> proof_witness(const CylinderColumn& column, int n_t, int n_s) {
    if (n_t < 2 || n_s < 4) throw InvalidArgument("proof_witness: grid too small");
    const PlanarCurve& curve = column.curve;

    auto [g1, g2] = tangent_components(curve);
    if (n_s != curve.n_samples) {
        g1 = PeriodicCubicSpline(curve.length, std::move(g1)).resample(n_s);
        g2 = PeriodicCubicSpline(curve.length, std::move(g2)).resample(n_s);
    }

    Eigen::MatrixXd u1 = Eigen::MatrixXd::Zero(n_t + 1, n_s);
    Eigen::MatrixXd u2 = Eigen::MatrixXd::Zero(n_t + 1, n_s);
    for (int j = 1; j < n_t; ++j) {
        const double f = std::sin(M_PI * j / n_t);  // sin(pi t / l) at t = j l / n_t
        for (int i = 0; i < n_s; ++i) {
            u1(j, i) = f * g1[i];
            u2(j, i) = f * g2[i];
        }
    }
    return {phi_evaluate(column, u1), phi_evaluate(column, u2)};
}

double full_form_min(const CylinderColumn& column, int n_t, int n_s,
                     FullFormDiagnostics* diagnostics) {
    if (n_t < 32) throw InvalidArgument("full_form_min: n_t >= 32 required");
    if (n_s < 64) throw InvalidArgument("full_form_min: n_s >= 64 required");
    if (!(column.column_length > 0.0)) {
        throw InvalidArgument("full_form_min: column length must be positive");
    }
    const double fine = min_eigenvalue_2d(column.curve, column.column_length, n_t, n_s);
    if (diagnostics) {
        const double coarse =
            min_eigenvalue_2d(column.curve, column.column_length, n_t / 2, n_s / 2);
        diagnostics->value = fine;
        diagnostics->coarse_value = coarse;
        // Second-order scheme: halving h multiplies the error by ~4.
        diagnostics->richardson_error = (fine - coarse) / 3.0;
        diagnostics->resolution_warning =
            std::abs(diagnostics->richardson_error) > 0.1 * std::abs(fine);
    }
    return fine;
}

double oracle_critical_length(const PlanarCurve& curve, const SolverConfig& config) {
    const double per_mode = per_mode_critical_length(curve, config.m_max, config.n_grid);

    auto f = [&](double l) {
        return full_form_min({curve, l}, config.n_t, config.n_s, nullptr);
    };

    double lo, hi;
    if (std::isfinite(per_mode)) {
        lo = 0.5 * per_mode;
        hi = std::min(2.0 * per_mode, config.l_max);
    } else {
        // No per-mode estimate: scan doublings up to l_max.
        double prev = 1.0;
        double fprev = f(prev);
        if (fprev < 0.0) {
            lo = 0.25;
            hi = prev;
        } else {
            lo = hi = prev;
            bool found = false;
            for (double l = 2.0; l <= config.l_max; l *= 2.0) {
                const double fl = f(l);
                if (fl < 0.0) {
                    lo = hi;
                    hi = l;
                    found = true;
                    break;
                }
                hi = l;
            }
            if (!found) return kInfinity;
            lo = hi / 2.0;
        }
    }

    double flo = f(lo);
    for (int it = 0; flo < 0.0 && it < 20; ++it) {
        hi = lo;
        lo *= 0.5;
        flo = f(lo);
    }
    if (flo < 0.0) {
        throw NumericFailure("bracket_failure",
                             "form minimum still negative at l = " + fmt(lo));
    }
    double fhi = f(hi);
    while (fhi > 0.0 && hi < config.l_max) {
        lo = hi;
        flo = fhi;
        hi = std::min(2.0 * hi, config.l_max);
        fhi = f(hi);
    }
    if (fhi > 0.0) return kInfinity;

    while ((hi - lo) > config.bisection_tol * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StabilityReport build_report(const PlanarCurve& curve, std::optional<double> l,
                             const SolverConfig& config, bool compute_oracle) {
    StabilityReport report;
    report.scalars = curve_scalars(curve);
    report.params = curve.params;
    report.theorem1 = theorem1_bound(report.scalars, curve.params.a);
    report.theorem2 = theorem2_bound(report.scalars, curve.params.a, curve.params.b);

    if (report.theorem1 && report.theorem2) {
        switch (bound_comparison(report.scalars, curve.params.a, curve.params.b)) {
            case BoundComparison::Theorem1Stronger: report.stronger_bound = "theorem1"; break;
            case BoundComparison::Theorem2Stronger: report.stronger_bound = "theorem2"; break;
            case BoundComparison::Tie: report.stronger_bound = "tie"; break;
        }
    } else if (report.theorem1) {
        report.stronger_bound = "theorem1";
    } else if (report.theorem2) {
        report.stronger_bound = "theorem2";
    } else {
        report.stronger_bound = "n/a";
    }

    const SLOperator op = assemble_sl_operator(curve, config.n_grid);
    const double lambda_odd = constrained_min_eigenvalue(op);
    const double lambda_even = eigen_spectrum(op, 1).eigenvalues[0];
    if (config.n_grid / 2 >= 32) {
        const SLOperator coarse = assemble_sl_operator(curve, config.n_grid / 2);
        const double co = constrained_min_eigenvalue(coarse);
        const double ce = eigen_spectrum(coarse, 1).eigenvalues[0];
        const double drift = std::max(std::abs(co - lambda_odd), std::abs(ce - lambda_even));
        if (drift > 1e-3 * std::max(1.0, std::abs(lambda_even))) {
            std::fprintf(stderr,
                         "warning: s-grid not converged (eigenvalue drift %.3e between n_grid "
                         "%d and %d)\n",
                         drift, config.n_grid / 2, config.n_grid);
        }
    }

    report.modes.reserve(config.m_max);
    for (int m = 1; m <= config.m_max; ++m) {
        ModeAnalysis mode;
        mode.mode_index = m;
        mode.constrained = (m % 2 == 1);
        mode.eigenvalue = mode.constrained ? lambda_odd : lambda_even;
        mode.threshold_length = threshold_from_eigenvalue(m, mode.eigenvalue);
        report.modes.push_back(mode);
    }
    int governing = 0;
    report.per_mode_critical =
        per_mode_critical_length(curve, config.m_max, config.n_grid, &governing);

    if (compute_oracle) {
        report.oracle_critical = oracle_critical_length(curve, config);

        // The 2D form admits every separated test function, so it can only
        // detect instability earlier than the per-mode estimate.
        if (*report.oracle_critical > report.per_mode_critical * (1.0 + 2e-2)) {
            throw InvariantViolation("oracle_vs_per_mode",
                                     "oracle " + fmt(*report.oracle_critical) +
                                         " exceeds per-mode estimate " +
                                         fmt(report.per_mode_critical));
        }
        if (is_embedded(curve)) {
            if (report.theorem1 && *report.oracle_critical > *report.theorem1 * 1.01) {
                throw InvariantViolation("oracle_vs_theorem1",
                                         "critical length exceeds the necessary bound");
            }
            if (report.theorem2 && *report.oracle_critical > *report.theorem2 * 1.01) {
                throw InvariantViolation("oracle_vs_theorem2",
                                         "critical length exceeds the necessary bound");
            }
        }
    }

    if (l) {
        if (!(*l > 0.0)) throw InvalidArgument("build_report: column length must be positive");
        const double crit =
            report.oracle_critical ? *report.oracle_critical : report.per_mode_critical;
        if (std::isfinite(crit)) {
            report.margin = (crit - *l) / crit;
            if (std::abs(*l - crit) <= 1e-3 * crit) {
                report.verdict = Verdict::Marginal;
            } else if (*l > crit) {
                report.verdict = Verdict::Unstable;
            } else if ((report.theorem1 && *l > *report.theorem1) ||
                       (report.theorem2 && *l > *report.theorem2)) {
                report.verdict = Verdict::Unstable;
            } else {
                report.verdict = Verdict::Stable;
            }
        } else {
            report.margin = kInfinity;
            report.verdict = ((report.theorem1 && *l > *report.theorem1) ||
                              (report.theorem2 && *l > *report.theorem2))
                                 ? Verdict::Unstable
                                 : Verdict::Stable;
        }
    }
    return report;
}

}  // namespace cylstab

#include "cylstab/spectral.hpp"

#include <cmath>

#include "cylstab/numerics.hpp"

namespace cylstab {

SLOperator make_sl_operator(double period, std::vector<double> potential) {
    const int n = static_cast<int>(potential.size());
    if (n < 32) throw InvalidArgument("SLOperator: grid too coarse (n_grid >= 32)");
    if (!(period > 0.0)) throw InvalidArgument("SLOperator: period must be positive");

    SLOperator op;
    op.period = period;
    op.n_grid = n;
    op.potential = std::move(potential);
    const double h = period / n;
    const double w = 1.0 / (h * h);
    op.matrix = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        op.matrix(i, i) = 2.0 * w - op.potential[i];
        const int ip = (i + 1) % n;
        const int im = (i + n - 1) % n;
        op.matrix(i, ip) += -w;
        op.matrix(i, im) += -w;
    }
    return op;
}

SLOperator assemble_sl_operator(const PlanarCurve& curve, int n_grid) {
    if (n_grid < 32) throw InvalidArgument("assemble_sl_operator: n_grid >= 32 required");
    std::vector<double> q = q_profile(curve);
    if (n_grid != curve.n_samples) {
        q = PeriodicCubicSpline(curve.length, std::move(q)).resample(n_grid);
    }
    return make_sl_operator(curve.length, std::move(q));
}

SpectrumSlice eigen_spectrum(const SLOperator& op, int count) {
    if (count < 1 || count > op.n_grid) {
        throw InvalidArgument("eigen_spectrum: count must lie in [1, n_grid]");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("no_convergence", "dense symmetric eigensolver failed");
    }
    const double h = op.period / op.n_grid;
    SpectrumSlice slice;
    slice.eigenvalues.resize(count);
    slice.eigenvectors.resize(op.n_grid, count);
    const double scale = 1.0 / std::sqrt(h);
    for (int j = 0; j < count; ++j) {
        slice.eigenvalues[j] = solver.eigenvalues()(j);
        slice.eigenvectors.col(j) = solver.eigenvectors().col(j) * scale;
    }
    return slice;
}

double constrained_min_eigenvalue(const SLOperator& op) {
    const int n = op.n_grid;
    // Householder reflector H = I - 2 v v^T / |v|^2 with v = 1/sqrt(n) + e_1
    // maps e_1 to -1/sqrt(n); its trailing n-1 columns span the zero-sum
    // hyperplane. The projected operator is the trailing block of H M H.
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    v(0) += 1.0;
    const double beta = 2.0 / v.squaredNorm();

    const Eigen::VectorXd mv = op.matrix * v;
    const double vmv = v.dot(mv);
    Eigen::MatrixXd projected = op.matrix;
    projected.noalias() -= beta * mv * v.transpose();
    projected.noalias() -= beta * v * mv.transpose();
    projected.noalias() += (beta * beta * vmv) * v * v.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        Eigen::MatrixXd(projected.bottomRightCorner(n - 1, n - 1)));
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("no_convergence", "projected eigensolver failed");
    }
    return solver.eigenvalues()(0);
}

double jacobi_field_residual(const PlanarCurve& curve, int n_grid) {
    if (n_grid < 32) throw InvalidArgument("jacobi_field_residual: n_grid >= 32 required");
    std::vector<double> q = q_profile(curve);
    std::vector<double> psi = rotation_field(curve);
    if (n_grid != curve.n_samples) {
        q = PeriodicCubicSpline(curve.length, std::move(q)).resample(n_grid);
        psi = PeriodicCubicSpline(curve.length, std::move(psi)).resample(n_grid);
    }
    const double h = curve.length / n_grid;
    const double w = 1.0 / (h * h);
    double worst = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        const int ip = (i + 1) % n_grid;
        const int im = (i + n_grid - 1) % n_grid;
        const double res = (2.0 * psi[i] - psi[ip] - psi[im]) * w - q[i] * psi[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace cylstab

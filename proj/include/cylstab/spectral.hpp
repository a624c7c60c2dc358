#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cylstab/common.hpp"
#include "cylstab/curve.hpp"

namespace cylstab {

/// Dense symmetric discretization of -d^2/ds^2 - q(s) on the periodic
/// uniform grid s_i = i L / n_grid.
struct SLOperator {
    double period{0.0};
    int n_grid{0};
    std::vector<double> potential;
    Eigen::MatrixXd matrix;
};

struct SpectrumSlice {
    std::vector<double> eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;      // n_grid x count, orthonormal with weight h
};

/// Build the operator directly from a potential sampled on the grid.
SLOperator make_sl_operator(double period, std::vector<double> potential);

/// Potential from q_profile, resampled by periodic cubic spline when the
/// curve sampling and the requested grid differ.
SLOperator assemble_sl_operator(const PlanarCurve& curve, int n_grid);

/// The count smallest eigenpairs (dense symmetric solve).
SpectrumSlice eigen_spectrum(const SLOperator& op, int count);

/// Minimum of the Rayleigh quotient over the zero-mean hyperplane, via an
/// explicit orthonormal basis of the complement of the constant vector.
double constrained_min_eigenvalue(const SLOperator& op);

/// Max-norm residual of the discrete Jacobi-field identity
/// (-D^2 - q) psi = 0 with psi = rotation_field resampled to n_grid.
double jacobi_field_residual(const PlanarCurve& curve, int n_grid);

}  // namespace cylstab

#pragma once

#include <Eigen/Dense>

namespace phenocurve {

/// Demmler-Reinsch basis on an equally spaced grid of [0, 1].
///
/// Columns are orthonormal under the grid inner product <f, g> = sum_i f(x_i) g(x_i) / n and
/// simultaneously diagonalize the roughness penalty int_0^1 f''(x)^2 dx. Column 0 is the
/// constant function 1, column 1 the normalized linear function; both carry eigenvalue 0.
/// Remaining eigenvalues are strictly positive and non-decreasing.
struct BasisSet {
  Eigen::MatrixXd functions;     // n x K
  Eigen::VectorXd penalty_eigs;  // K
  int samples = 0;               // K
  int smoothness = 2;

  int grid_n() const { return static_cast<int>(functions.rows()); }
  int size() const { return static_cast<int>(functions.cols()); }
};

/// Cubic B-spline basis with `samples` functions and equally spaced interior knots, evaluated
/// (derivative order 0..2) at x. Returns a vector of length `samples`.
Eigen::VectorXd bspline_row(int samples, double x, int deriv = 0);

/// Exact roughness penalty matrix int B_i''(x) B_j''(x) dx of the cubic B-spline basis.
Eigen::MatrixXd bspline_penalty(int samples);

BasisSet build_dr_basis(int grid_n, int samples);

}  // namespace phenocurve

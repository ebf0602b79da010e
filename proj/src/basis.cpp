#include "phenocurve/basis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "phenocurve/errors.hpp"

namespace phenocurve {

namespace {

constexpr int kDegree = 3;

// Clamped knot vector on [0, 1] with samples - degree - 1 equally spaced interior knots.
std::vector<double> make_knots(int samples) {
  const int intervals = samples - kDegree;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(samples + kDegree + 1));
  for (int i = 0; i < kDegree; ++i) knots.push_back(0.0);
  for (int i = 0; i <= intervals; ++i) knots.push_back(static_cast<double>(i) / intervals);
  for (int i = 0; i < kDegree; ++i) knots.push_back(1.0);
  return knots;
}

// B_{i,degree}(x) for every i, via the Cox-de Boor recursion.
std::vector<double> basis_values(const std::vector<double>& knots, int degree, double x) {
  const std::size_t nk = knots.size();
  std::vector<double> b(nk - 1, 0.0);
  // Right end belongs to the last non-empty interval.
  std::size_t span = 0;
  for (std::size_t i = 0; i + 1 < nk; ++i) {
    if (knots[i] < knots[i + 1] && knots[i] <= x) span = i;
  }
  b[span] = 1.0;
  for (int d = 1; d <= degree; ++d) {
    std::vector<double> next(nk - 1 - static_cast<std::size_t>(d), 0.0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      double v = 0.0;
      const double left = knots[i + static_cast<std::size_t>(d)] - knots[i];
      const double right = knots[i + static_cast<std::size_t>(d) + 1] - knots[i + 1];
      if (left > 0.0) v += (x - knots[i]) / left * b[i];
      if (right > 0.0) v += (knots[i + static_cast<std::size_t>(d) + 1] - x) / right * b[i + 1];
      next[i] = v;
    }
    b = std::move(next);
  }
  return b;
}

std::vector<double> basis_derivative(const std::vector<double>& knots, int degree, int deriv, double x) {
  if (deriv == 0) return basis_values(knots, degree, x);
  const auto lower = basis_derivative(knots, degree - 1, deriv - 1, x);
  std::vector<double> out(lower.size() - 1, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double left = knots[i + static_cast<std::size_t>(degree)] - knots[i];
    const double right = knots[i + static_cast<std::size_t>(degree) + 1] - knots[i + 1];
    double v = 0.0;
    if (left > 0.0) v += degree * lower[i] / left;
    if (right > 0.0) v -= degree * lower[i + 1] / right;
    out[i] = v;
  }
  return out;
}

}  // namespace

Eigen::VectorXd bspline_row(int samples, double x, int deriv) {
  require(samples >= kDegree + 1, "bspline_row: need at least 4 basis functions");
  require(deriv >= 0 && deriv <= kDegree, "bspline_row: derivative order out of range");
  const auto knots = make_knots(samples);
  const auto values = basis_derivative(knots, kDegree, deriv, x);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd bspline_penalty(int samples) {
  require(samples >= kDegree + 1, "bspline_penalty: need at least 4 basis functions");
  const auto knots = make_knots(samples);
  // Second derivatives are linear on each knot interval, so 3-point Gauss-Legendre is exact.
  const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(samples, samples);
  const int intervals = samples - kDegree;
  for (int k = 0; k < intervals; ++k) {
    const double a = static_cast<double>(k) / intervals;
    const double b = static_cast<double>(k + 1) / intervals;
    for (int q = 0; q < 3; ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * nodes[q];
      const auto d2 = basis_derivative(knots, kDegree, 2, x);
      const Eigen::Map<const Eigen::VectorXd> v(d2.data(), samples);
      p.noalias() += (0.5 * (b - a) * weights[q]) * v * v.transpose();
    }
  }
  return p;
}

BasisSet build_dr_basis(int grid_n, int samples) {
  require(samples >= 4, "build_dr_basis: samples must be >= 4");
  if (samples > grid_n) {
    throw Error(ErrorKind::Contract, "build_dr_basis: rank error, samples " + std::to_string(samples) +
                                         " exceeds grid size " + std::to_string(grid_n));
  }
  const auto knots = make_knots(samples);

  Eigen::MatrixXd raw(grid_n, samples);
  for (int i = 0; i < grid_n; ++i) {
    const double x = static_cast<double>(i) / (grid_n - 1);
    const auto row = basis_values(knots, kDegree, x);
    for (int k = 0; k < samples; ++k) raw(i, k) = row[static_cast<std::size_t>(k)];
  }

  const Eigen::MatrixXd gram = raw.transpose() * raw / static_cast<double>(grid_n);
  const Eigen::LLT<Eigen::MatrixXd> chol(gram);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "build_dr_basis: Gram matrix is not positive definite");
  }
  const Eigen::MatrixXd lower = chol.matrixL();

  // Null space of the penalty in B-spline coefficients: the constant (partition of unity) and
  // the identity function (Greville abscissae).
  Eigen::MatrixXd null_coefs(samples, 2);
  for (int k = 0; k < samples; ++k) {
    null_coefs(k, 0) = 1.0;
    null_coefs(k, 1) = (knots[static_cast<std::size_t>(k + 1)] + knots[static_cast<std::size_t>(k + 2)] +
                        knots[static_cast<std::size_t>(k + 3)]) / 3.0;
  }
  // Whitened coordinates w = L^T theta turn the grid inner product into the Euclidean one.
  const Eigen::MatrixXd null_white = lower.transpose() * null_coefs;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(null_white);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(samples, samples);
  if (q.col(0).dot(null_white.col(0)) < 0.0) q.col(0) *= -1.0;
  if (q.col(1).dot(null_white.col(1)) < 0.0) q.col(1) *= -1.0;

  const Eigen::MatrixXd penalty = bspline_penalty(samples);
  const Eigen::MatrixXd l_inv_p = lower.triangularView<Eigen::Lower>().solve(penalty);
  const Eigen::MatrixXd whitened_penalty =
      lower.triangularView<Eigen::Lower>().solve(l_inv_p.transpose()).transpose();

  const Eigen::MatrixXd complement = q.rightCols(samples - 2);
  Eigen::MatrixXd restricted = complement.transpose() * whitened_penalty * complement;
  restricted = 0.5 * (restricted + restricted.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(restricted);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "build_dr_basis: eigendecomposition failed");
  }

  Eigen::MatrixXd rotation(samples, samples);
  rotation.leftCols(2) = q.leftCols(2);
  rotation.rightCols(samples - 2) = complement * eig.eigenvectors();
  const Eigen::MatrixXd coef_map =
      lower.transpose().triangularView<Eigen::Upper>().solve(rotation);

  BasisSet basis;
  basis.samples = samples;
  basis.functions = raw * coef_map;
  basis.penalty_eigs.resize(samples);
  basis.penalty_eigs(0) = 0.0;
  basis.penalty_eigs(1) = 0.0;
  basis.penalty_eigs.tail(samples - 2) = eig.eigenvalues().cwiseMax(0.0);

  // Deterministic signs: largest-magnitude grid value of every penalized function is positive.
  for (int k = 2; k < samples; ++k) {
    Eigen::Index arg = 0;
    basis.functions.col(k).cwiseAbs().maxCoeff(&arg);
    if (basis.functions(arg, k) < 0.0) basis.functions.col(k) *= -1.0;
  }
  return basis;
}

}  // namespace phenocurve

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "phenocurve/basis.hpp"
#include "phenocurve/series.hpp"

namespace phenocurve {

struct TrendCurve {
  Eigen::VectorXd values;  // tau on the common grid
  double period = 1.0;

  int grid_n() const { return static_cast<int>(values.size()); }
};

struct TrendOnlyFit {
  Eigen::VectorXd theta_tau;
  double lambda_tau = 0.0;
  bool gcv_fallback = false;  // REML failed and the GCV grid picked lambda_tau
};

/// Penalized mean of the columns of Y in the basis: the mean curve's basis coefficients
/// shrunk by 1 / (1 + lambda * penalty_eig_k).
Eigen::VectorXd smooth_mean_coefficients(const CurveMatrix& y, const BasisSet& basis, double lambda);

/// Trend-only model with lambda_tau chosen by REML under the mixed-model representation of the
/// penalized spline (GCV grid over 1e-8..1e4 when REML has no interior optimum).
TrendOnlyFit fit_trend_only(const CurveMatrix& y, const BasisSet& basis);

/// Initial PC coefficients (K x h): SVD of the per-curve residual coefficients around the trend.
/// Returns a zero matrix when the residuals carry no variation.
Eigen::MatrixXd init_pc(const CurveMatrix& y, const BasisSet& basis, const Eigen::VectorXd& theta_tau,
                        int h);

struct FpcaFit {
  Eigen::VectorXd theta_tau;   // K
  Eigen::MatrixXd theta_psi;   // K x h, orthonormal columns
  Eigen::MatrixXd scores;      // m x h, centred
  double lambda_tau = 0.0;
  double lambda_psi = 0.0;
  double residual_variance = 0.0;
  Eigen::VectorXd score_shrinkage;  // h factors in [0, 1] applied to least-squares scores
  int h = 1;
  int iterations = 0;
  bool converged = false;
  bool lambda_tau_fallback = false;
  bool lambda_psi_fallback = false;
  bool degenerate_init = false;     // residuals had no variation; PCs carry no signal
  double period = 1.0;
  std::vector<double> objective_trace;        // penalized criterion after each iteration
  std::vector<double> orthonormality_trace;   // max |Theta^T Theta - I| after each iteration
  std::vector<double> change_trace;           // convergence metric after each iteration
};

/// Alternating estimation of the trend and h principal component functions.
/// Throws NumericalFailure when an iterate becomes non-finite.
FpcaFit fpca_fit(const CurveMatrix& y, const BasisSet& basis, int h = 1, int max_iter = 200,
                 double tol = 1e-6);

/// Penalized criterion evaluated at the fit's parameters and smoothing values.
double penalized_objective(const CurveMatrix& y, const BasisSet& basis, const FpcaFit& fit);

TrendCurve predict_trend(const FpcaFit& fit, const BasisSet& basis);
Eigen::MatrixXd predict_components(const FpcaFit& fit, const BasisSet& basis);  // n x h

}  // namespace phenocurve

#include "phenocurve/fpca.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "phenocurve/errors.hpp"

namespace phenocurve {

namespace {

// Search range for log10(lambda) in the REML criteria.
constexpr double kLogLambdaMin = -12.0;
constexpr double kLogLambdaMax = 10.0;
constexpr double kLogLambdaStep = 0.25;

struct LambdaChoice {
  double lambda = 0.0;
  bool ok = false;  // interior minimum with finite criterion
  bool at_lower = false;  // finite criterion still falling at the smallest lambda
};

// Coarse grid scan over log10(lambda) followed by Brent refinement around the best grid point.
// Fails when the criterion is not finite or the minimum sits on the search boundary.
LambdaChoice minimize_log_lambda(const std::function<double(double)>& criterion) {
  const int points = static_cast<int>(std::lround((kLogLambdaMax - kLogLambdaMin) / kLogLambdaStep)) + 1;
  int best = -1;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double v = criterion(kLogLambdaMin + i * kLogLambdaStep);
    if (!std::isfinite(v)) return {};
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best <= 0 || best >= points - 1) {
    return {std::pow(10.0, kLogLambdaMin + best * kLogLambdaStep), false, best == 0};
  }
  const double centre = kLogLambdaMin + best * kLogLambdaStep;
  const auto [arg, value] = boost::math::tools::brent_find_minima(
      criterion, centre - kLogLambdaStep, centre + kLogLambdaStep, 40);
  if (!std::isfinite(value)) return {};
  return {std::pow(10.0, value <= best_value ? arg : centre), true};
}

// Data of a coordinate-wise mixed model: z_k = theta_k + e_k with Var(e_k) = sigma^2 / weight,
// theta_k ~ N(0, sigma_u^2 / d_k) for penalized k, fixed otherwise; lambda = sigma^2 / (weight sigma_u^2).
struct DiagonalModel {
  const Eigen::VectorXd* z;
  const Eigen::VectorXd* eigs;
  double weight;      // n*m for the trend
  double extra_rss;   // residual sum of squares outside the coefficient space
  double restricted_n;  // observations minus fixed effects and removed dof
};

// -2 log restricted likelihood with sigma^2 profiled out.
double reml_profiled(const DiagonalModel& model, double log_lambda) {
  const double lambda = std::pow(10.0, log_lambda);
  double q = model.extra_rss;
  double logdet = 0.0;
  for (Eigen::Index k = 0; k < model.z->size(); ++k) {
    const double d = (*model.eigs)(k);
    if (d <= 0.0) continue;
    const double w = 1.0 + 1.0 / (lambda * d);
    q += model.weight * (*model.z)(k) * (*model.z)(k) / w;
    logdet += std::log(w);
  }
  if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
  return model.restricted_n * std::log(q) + logdet;
}

double gcv_score(const DiagonalModel& model, double lambda, double total_n) {
  double rss = model.extra_rss;
  double trace = 0.0;
  for (Eigen::Index k = 0; k < model.z->size(); ++k) {
    const double s = 1.0 / (1.0 + lambda * (*model.eigs)(k));
    const double r = (*model.z)(k) * (1.0 - s);
    rss += model.weight * r * r;
    trace += s;
  }
  const double denom = total_n - trace;
  return total_n * rss / (denom * denom);
}

// lambda_tau by REML; on failure the 17-point GCV grid 1e-8, 10^-7.25, ..., 1e4.
LambdaChoice select_trend_lambda(const DiagonalModel& model, double total_n) {
  auto choice = minimize_log_lambda([&](double ll) { return reml_profiled(model, ll); });
  if (choice.ok) return choice;
  // Noise-free data: nothing to smooth away, the smallest lambda is the answer.
  if (choice.at_lower) return {choice.lambda, true};
  double best_lambda = 1e-8;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 17; ++i) {
    const double lambda = std::pow(10.0, -8.0 + 0.75 * i);
    const double g = gcv_score(model, lambda, total_n);
    if (g < best) {
      best = g;
      best_lambda = lambda;
    }
  }
  return {best_lambda, false};
}

Eigen::VectorXd shrink(const Eigen::VectorXd& coefs, const Eigen::VectorXd& eigs, double lambda) {
  return coefs.array() / (1.0 + lambda * eigs.array());
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q;
}

double orthonormality_error(const Eigen::MatrixXd& theta) {
  const auto h = theta.cols();
  return (theta.transpose() * theta - Eigen::MatrixXd::Identity(h, h)).cwiseAbs().maxCoeff();
}

// Deterministic sign: the largest-magnitude coefficient of every column is positive.
void canonical_signs(Eigen::MatrixXd& theta) {
  for (Eigen::Index k = 0; k < theta.cols(); ++k) {
    Eigen::Index arg = 0;
    theta.col(k).cwiseAbs().maxCoeff(&arg);
    if (theta(arg, k) < 0.0) theta.col(k) *= -1.0;
  }
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Curve data projected on the orthonormal basis.
struct Projection {
  Eigen::MatrixXd coefs;     // K x m, c_j = B^T y_j / n
  Eigen::VectorXd mean;      // K
  Eigen::MatrixXd centred;   // K x m
  double out_of_span = 0.0;  // sum_j ||y_j - B c_j||^2
  double n = 0.0;
  double m = 0.0;
};

Projection project(const CurveMatrix& y, const BasisSet& basis) {
  require(y.grid_n() == basis.grid_n(), "fpca: curve grid and basis grid differ");
  require(y.curves() >= 1, "fpca: no curves");
  require(y.samples.allFinite(), "fpca: curve matrix contains non-finite values");
  Projection p;
  p.n = static_cast<double>(y.grid_n());
  p.m = static_cast<double>(y.curves());
  p.coefs = basis.functions.transpose() * y.samples / p.n;
  p.mean = p.coefs.rowwise().mean();
  p.centred = p.coefs.colwise() - p.mean;
  p.out_of_span = (y.samples - basis.functions * p.coefs).squaredNorm();
  return p;
}

// Criterion in coefficient space; the score ridge weights are (1 - s_k) / s_k.
double objective(const Projection& p, const Eigen::VectorXd& eigs, const Eigen::VectorXd& theta_tau,
                 const Eigen::MatrixXd& theta_psi, const Eigen::MatrixXd& scores,
                 const Eigen::VectorXd& shrinkage, double lambda_tau, double lambda_psi) {
  const Eigen::MatrixXd resid =
      (p.coefs.colwise() - theta_tau) - theta_psi * scores.transpose();
  double fit = p.out_of_span + p.n * resid.squaredNorm();
  for (Eigen::Index k = 0; k < scores.cols(); ++k) {
    const double s = shrinkage(k);
    if (s > 0.0) fit += p.n * (1.0 - s) / s * scores.col(k).squaredNorm();
  }
  double penalty = lambda_tau * (eigs.array() * theta_tau.array().square()).sum();
  for (Eigen::Index k = 0; k < theta_psi.cols(); ++k) {
    penalty += lambda_psi * (eigs.array() * theta_psi.col(k).array().square()).sum();
  }
  return fit / (p.n * p.m) + penalty;
}

// Scores minimizing the criterion for fixed Theta (orthonormal) under the centring constraint.
Eigen::MatrixXd profile_scores(const Projection& p, const Eigen::MatrixXd& theta_psi,
                               const Eigen::VectorXd& shrinkage) {
  Eigen::MatrixXd u = p.centred.transpose() * theta_psi;  // m x h
  for (Eigen::Index k = 0; k < u.cols(); ++k) u.col(k) *= shrinkage(k);
  return u;
}

}  // namespace

Eigen::VectorXd smooth_mean_coefficients(const CurveMatrix& y, const BasisSet& basis, double lambda) {
  require(lambda >= 0.0, "smooth_mean_coefficients: lambda must be non-negative");
  const auto p = project(y, basis);
  return shrink(p.mean, basis.penalty_eigs, lambda);
}

TrendOnlyFit fit_trend_only(const CurveMatrix& y, const BasisSet& basis) {
  const auto p = project(y, basis);
  const double total = p.n * p.m;
  const DiagonalModel model{&p.mean, &basis.penalty_eigs, total,
                            p.out_of_span + p.n * p.centred.squaredNorm(), total - 2.0};
  const auto choice = select_trend_lambda(model, total);
  TrendOnlyFit fit;
  fit.lambda_tau = choice.lambda;
  fit.gcv_fallback = !choice.ok;
  fit.theta_tau = shrink(p.mean, basis.penalty_eigs, fit.lambda_tau);
  return fit;
}

Eigen::MatrixXd init_pc(const CurveMatrix& y, const BasisSet& basis, const Eigen::VectorXd& theta_tau,
                        int h) {
  const int k = basis.size();
  require(h >= 1 && h <= std::min(y.curves(), k), "init_pc: h must lie in 1..min(m, K)");
  require(theta_tau.size() == k, "init_pc: trend coefficient length differs from basis size");
  const auto p = project(y, basis);
  // Least-squares coefficients of the residual curves; rows are curves (m x K).
  const Eigen::MatrixXd gamma = (p.coefs.colwise() - theta_tau).transpose();
  // Zero up to rounding of the projection.
  if (gamma.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, p.coefs.cwiseAbs().maxCoeff())) {
    return Eigen::MatrixXd::Zero(k, h);
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gamma, Eigen::ComputeThinV);
  Eigen::MatrixXd scaled = svd.matrixV().leftCols(h) * svd.singularValues().head(h).asDiagonal();
  const double tiny = 1e-12 * std::max(1.0, svd.singularValues()(0));
  if (svd.singularValues()(h - 1) <= tiny) {
    // Fewer than h directions carry variation; keep the informative ones and pad with
    // orthogonal directions so the result stays orthonormal.
    scaled = svd.matrixV().leftCols(h);
  }
  Eigen::MatrixXd theta = orthonormalize(scaled);
  canonical_signs(theta);
  return theta;
}

double penalized_objective(const CurveMatrix& y, const BasisSet& basis, const FpcaFit& fit) {
  const auto p = project(y, basis);
  return objective(p, basis.penalty_eigs, fit.theta_tau, fit.theta_psi, fit.scores,
                   fit.score_shrinkage, fit.lambda_tau, fit.lambda_psi);
}

FpcaFit fpca_fit(const CurveMatrix& y, const BasisSet& basis, int h, int max_iter, double tol) {
  require(y.curves() >= 2, "fpca_fit: at least two curves are required");
  require(h >= 1 && h <= std::min(y.curves(), basis.size()), "fpca_fit: h must lie in 1..min(m, K)");
  require(max_iter >= 1, "fpca_fit: max_iter must be >= 1");
  require(tol > 0.0, "fpca_fit: tol must be positive");

  const auto p = project(y, basis);
  const Eigen::VectorXd& eigs = basis.penalty_eigs;
  const int k_dim = basis.size();
  const double total = p.n * p.m;

  FpcaFit fit;
  fit.h = h;
  fit.period = y.period;

  // Step 1: trend-only model, then PCs from the SVD of the residual coefficients.
  const auto trend0 = fit_trend_only(y, basis);
  fit.lambda_tau = trend0.lambda_tau;
  fit.lambda_tau_fallback = trend0.gcv_fallback;
  fit.theta_tau = trend0.theta_tau;
  Eigen::MatrixXd theta = init_pc(y, basis, fit.theta_tau, h);
  if (theta.cwiseAbs().maxCoeff() == 0.0) {
    fit.degenerate_init = true;
    theta = Eigen::MatrixXd::Identity(k_dim, h);
    if (k_dim >= h + 2) theta = Eigen::MatrixXd::Identity(k_dim, k_dim).middleCols(2, h);
  }
  fit.score_shrinkage = Eigen::VectorXd::Ones(h);

  Eigen::VectorXd previous_trend = basis.functions * fit.theta_tau;
  Eigen::MatrixXd previous_pcs = basis.functions * theta;
  Eigen::MatrixXd scores;

  for (int iter = 1; iter <= max_iter; ++iter) {
    // (a) scores given Theta; smoothing parameters and the score model are estimated on the
    // first pass and held fixed afterwards so the criterion is comparable across iterations.
    if (iter == 1) {
      const Eigen::MatrixXd u = p.centred.transpose() * theta;  // least-squares scores
      const double explained_rss =
          p.out_of_span + p.n * (p.centred - theta * u.transpose()).squaredNorm();
      const double dof = std::max(1.0, total - k_dim - (p.m - 1.0) * h);
      fit.residual_variance = explained_rss / dof;
      const double noise = fit.residual_variance / p.n;  // variance of a least-squares score
      for (int k = 0; k < h; ++k) {
        const double var_u = u.col(k).squaredNorm() / (p.m - 1.0);
        const double var_v = std::max(0.0, var_u - noise);
        fit.score_shrinkage(k) = var_v > 0.0 ? var_v / (var_v + noise) : 0.0;
      }

      // (b) lambda_tau refreshed with the between-curve variation explained by the PCs removed.
      const DiagonalModel model{&p.mean, &eigs, total, explained_rss,
                                std::max(1.0, total - 2.0 - (p.m - 1.0) * h)};
      const auto choice = select_trend_lambda(model, total);
      fit.lambda_tau = choice.lambda;
      fit.lambda_tau_fallback = fit.lambda_tau_fallback || !choice.ok;
    }
    scores = profile_scores(p, theta, fit.score_shrinkage);
    fit.theta_tau = shrink(p.mean, eigs, fit.lambda_tau);

    // (c) PC coefficients from the penalized normal equations with partial residuals.
    const Eigen::MatrixXd resid = p.coefs.colwise() - fit.theta_tau;  // K x m
    if (iter == 1) {
      // lambda_psi by REML on the per-component least-squares coefficient estimates.
      std::vector<Eigen::VectorXd> estimates;
      std::vector<double> noise;
      for (int k = 0; k < h; ++k) {
        const double s_k = scores.col(k).squaredNorm();
        if (!(s_k > 0.0)) continue;
        Eigen::MatrixXd partial = resid;
        for (int l = 0; l < h; ++l) {
          if (l != k) partial -= theta.col(l) * scores.col(l).transpose();
        }
        estimates.push_back(partial * scores.col(k) / s_k);
        noise.push_back(fit.residual_variance / (p.n * s_k));
      }
      if (estimates.empty()) {
        fit.lambda_psi = 0.0;
      } else {
        const double sigma2 = fit.residual_variance;
        auto criterion = [&](double log_lambda) {
          const double lambda = std::pow(10.0, log_lambda);
          const double var_theta = sigma2 / (p.n * p.m * lambda);
          double value = 0.0;
          for (std::size_t c = 0; c < estimates.size(); ++c) {
            for (Eigen::Index i = 0; i < eigs.size(); ++i) {
              if (eigs(i) <= 0.0) continue;
              const double v = noise[c] + var_theta / eigs(i);
              value += std::log(v) + estimates[c](i) * estimates[c](i) / v;
            }
          }
          return value;
        };
        const auto choice = minimize_log_lambda(criterion);
        fit.lambda_psi = choice.lambda;
        fit.lambda_psi_fallback = !choice.ok;
      }
    }

    const auto current_objective = [&](const Eigen::MatrixXd& th) {
      return objective(p, eigs, fit.theta_tau, th, profile_scores(p, th, fit.score_shrinkage),
                       fit.score_shrinkage, fit.lambda_tau, fit.lambda_psi);
    };

    Eigen::MatrixXd candidate = theta;
    bool updated = false;
    for (int k = 0; k < h; ++k) {
      const double s_k = scores.col(k).squaredNorm();
      if (!(s_k > 0.0)) continue;
      Eigen::MatrixXd partial = resid;
      for (int l = 0; l < h; ++l) {
        if (l != k) partial -= candidate.col(l) * scores.col(l).transpose();
      }
      const Eigen::VectorXd numer = partial * scores.col(k);
      candidate.col(k) = numer.array() / (s_k + p.m * fit.lambda_psi * eigs.array());
      updated = true;
    }

    double value = current_objective(theta);
    if (updated) {
      // QR re-orthonormalization, accepted only when the profiled criterion does not increase;
      // otherwise step back towards the current Theta.
      const Eigen::MatrixXd step = candidate - theta;
      for (int halving = 0; halving <= 30; ++halving) {
        const double t = std::ldexp(1.0, -halving);
        const Eigen::MatrixXd trial_raw = theta + t * step;
        if (!all_finite(trial_raw)) throw NumericalFailure(iter, "fpca_fit: non-finite PC update");
        Eigen::MatrixXd trial = orthonormalize(trial_raw);
        for (int k = 0; k < h; ++k) {
          if (trial.col(k).dot(theta.col(k)) < 0.0) trial.col(k) *= -1.0;
        }
        const double trial_value = current_objective(trial);
        if (std::isfinite(trial_value) && trial_value <= value) {
          theta = trial;
          value = trial_value;
          break;
        }
      }
    }

    scores = profile_scores(p, theta, fit.score_shrinkage);
    if (!all_finite(theta) || !all_finite(scores) || !fit.theta_tau.allFinite() || !std::isfinite(value)) {
      throw NumericalFailure(iter, "fpca_fit: non-finite iterate");
    }

    const Eigen::VectorXd trend = basis.functions * fit.theta_tau;
    const Eigen::MatrixXd pcs = basis.functions * theta;
    const double change = std::max((trend - previous_trend).cwiseAbs().maxCoeff(),
                                   (pcs - previous_pcs).cwiseAbs().maxCoeff());
    previous_trend = trend;
    previous_pcs = pcs;

    fit.objective_trace.push_back(value);
    fit.orthonormality_trace.push_back(orthonormality_error(theta));
    fit.change_trace.push_back(change);
    fit.iterations = iter;
    if (change < tol) {
      fit.converged = true;
      break;
    }
  }

  fit.theta_psi = theta;
  fit.scores = scores;
  return fit;
}

TrendCurve predict_trend(const FpcaFit& fit, const BasisSet& basis) {
  require(fit.theta_tau.size() == basis.size(), "predict_trend: fit and basis sizes differ");
  TrendCurve trend;
  trend.values = basis.functions * fit.theta_tau;
  trend.period = fit.period;
  return trend;
}

Eigen::MatrixXd predict_components(const FpcaFit& fit, const BasisSet& basis) {
  require(fit.theta_psi.rows() == basis.size(), "predict_components: fit and basis sizes differ");
  return basis.functions * fit.theta_psi;
}

}  // namespace phenocurve

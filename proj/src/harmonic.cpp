#include "phenocurve/harmonic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phenocurve/errors.hpp"

namespace phenocurve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_model(const HarmonicModel& m) {
  require(m.sin_coefs.size() == m.cos_coefs.size(), "harmonic model: coefficient length mismatch");
  require(m.period > 0.0, "harmonic model: period must be positive");
}

}  // namespace

HarmonicModel HarmonicModel::constant(double value, double period, int num_freq) {
  HarmonicModel m;
  m.intercept = value;
  m.period = period;
  m.sin_coefs.assign(static_cast<std::size_t>(num_freq), 0.0);
  m.cos_coefs.assign(static_cast<std::size_t>(num_freq), 0.0);
  return m;
}

HarmonicModel HarmonicModel::single_cosine(double c0, double c1, double period, double phase_deg) {
  // c1 cos(w t - phi) = c1 cos(phi) cos(w t) + c1 sin(phi) sin(w t)
  const double phi = phase_deg * std::numbers::pi / 180.0;
  HarmonicModel m;
  m.intercept = c0;
  m.period = period;
  m.sin_coefs = {c1 * std::sin(phi)};
  m.cos_coefs = {c1 * std::cos(phi)};
  return m;
}

double HarmonicModel::operator()(double t) const { return eval_harmonic(*this, t); }

Eigen::MatrixXd design_matrix_at(std::span<const double> times, double period, int num_freq) {
  require(num_freq >= 0, "design_matrix: num_freq must be non-negative");
  require(period > 0.0, "design_matrix: period must be positive");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(times.size()), 2 * num_freq + 1);
  for (std::size_t r = 0; r < times.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    x(row, 0) = 1.0;
    for (int j = 1; j <= num_freq; ++j) {
      const double arg = kTwoPi * j * times[r] / period;
      x(row, 2 * j - 1) = std::sin(arg);
      x(row, 2 * j) = std::cos(arg);
    }
  }
  return x;
}

Eigen::MatrixXd design_matrix(int season_len, int num_freq) {
  require(season_len >= 1, "design_matrix: season length must be positive");
  if (2 * num_freq + 1 > season_len) {
    throw Error(ErrorKind::Identifiability,
                "design_matrix: 2p+1 = " + std::to_string(2 * num_freq + 1) +
                    " exceeds season length " + std::to_string(season_len));
  }
  std::vector<double> t(static_cast<std::size_t>(season_len));
  for (int i = 0; i < season_len; ++i) t[static_cast<std::size_t>(i)] = i + 1.0;
  return design_matrix_at(t, season_len, num_freq);
}

HarmonicFit fit_harmonic_at(std::span<const double> times, std::span<const double> y, int num_freq,
                            double period) {
  require(times.size() == y.size(), "fit_harmonic: times and values differ in length");
  require(num_freq >= 1, "fit_harmonic: num_freq must be >= 1");
  const int n = static_cast<int>(y.size());
  const int cols = 2 * num_freq + 1;
  if (cols > n) {
    throw Error(ErrorKind::Identifiability, "fit_harmonic: 2p+1 = " + std::to_string(cols) +
                                                " exceeds " + std::to_string(n) + " observations");
  }
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) {
    const double v = y[static_cast<std::size_t>(i)];
    require(std::isfinite(v), "fit_harmonic: non-finite observation");
    z(i) = v;
  }

  const Eigen::MatrixXd x = design_matrix_at(times, period, num_freq);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < cols) {
    throw Error(ErrorKind::Identifiability, "fit_harmonic: rank-deficient design matrix");
  }
  const Eigen::VectorXd beta = qr.solve(z);

  HarmonicFit fit;
  fit.model.period = period;
  fit.model.intercept = beta(0);
  fit.model.sin_coefs.resize(static_cast<std::size_t>(num_freq));
  fit.model.cos_coefs.resize(static_cast<std::size_t>(num_freq));
  for (int j = 1; j <= num_freq; ++j) {
    fit.model.sin_coefs[static_cast<std::size_t>(j - 1)] = beta(2 * j - 1);
    fit.model.cos_coefs[static_cast<std::size_t>(j - 1)] = beta(2 * j);
  }
  const double rss = (z - x * beta).squaredNorm();
  fit.diagnostics.rss = rss;
  fit.diagnostics.dof = n - cols;
  fit.diagnostics.residual_sd = fit.diagnostics.dof > 0 ? std::sqrt(rss / fit.diagnostics.dof) : 0.0;
  return fit;
}

HarmonicFit fit_harmonic(std::span<const double> y, int num_freq, int season_len) {
  require(static_cast<int>(y.size()) == season_len,
          "fit_harmonic: expected " + std::to_string(season_len) + " values");
  if (2 * num_freq + 1 > season_len) {
    throw Error(ErrorKind::Identifiability, "fit_harmonic: 2p+1 exceeds season length");
  }
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i + 1);
  return fit_harmonic_at(t, y, num_freq, season_len);
}

double eval_harmonic(const HarmonicModel& model, double t) {
  double value = model.intercept;
  const double w = kTwoPi / model.period;
  for (std::size_t j = 0; j < model.sin_coefs.size(); ++j) {
    const double arg = w * static_cast<double>(j + 1) * t;
    value += model.sin_coefs[j] * std::sin(arg) + model.cos_coefs[j] * std::cos(arg);
  }
  return value;
}

HarmonicModel derivative(const HarmonicModel& model, int order) {
  require(order >= 1 && order <= 4, "derivative: order must be in 1..4");
  check_model(model);
  HarmonicModel d = model;
  d.intercept = 0.0;
  for (int step = 0; step < order; ++step) {
    for (std::size_t j = 0; j < d.sin_coefs.size(); ++j) {
      const double w = kTwoPi * static_cast<double>(j + 1) / d.period;
      const double a = d.sin_coefs[j];
      const double b = d.cos_coefs[j];
      d.sin_coefs[j] = -b * w;
      d.cos_coefs[j] = a * w;
    }
  }
  return d;
}

PhenoDates closed_form_phenodates(double c0, double c1, double period, double phase_deg) {
  (void)c0;  // dates do not depend on the offset
  require(c1 > 0.0, "closed_form_phenodates: amplitude must be positive");
  require(phase_deg > 0.0 && phase_deg < 360.0, "closed_form_phenodates: phase outside (0, 360)");
  require(period > 0.0, "closed_form_phenodates: period must be positive");

  PhenoDates out;
  out.period = period;
  auto put = [&](Phase p, double position) {
    out[p] = PhenoDate{position, to_doy(position, period)};
  };
  const double scale = period / 360.0;
  if (phase_deg >= 180.0) put(Phase::GreenUp, (phase_deg - 180.0) * scale);
  if (phase_deg >= 90.0) put(Phase::StartOfSeason, (phase_deg - 90.0) * scale);
  put(Phase::Maturity, phase_deg * scale);
  put(Phase::Senescence, phase_deg * scale);
  if (phase_deg < 270.0) put(Phase::EndOfSeason, (phase_deg + 90.0) * scale);
  if (phase_deg < 180.0) put(Phase::Dormancy, (phase_deg + 180.0) * scale);

  out.set(DateFlag::SenEqualsMat);
  if (!out[Phase::GreenUp]) out.set(DateFlag::MissingGU);
  if (!out[Phase::Dormancy]) out.set(DateFlag::MissingDor);
  return out;
}

}  // namespace phenocurve

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phenocurve/dates.hpp"

namespace phenocurve {

/// Truncated Fourier series with period L:
///   g(t) = intercept + sum_j sin_coefs[j] sin(2 pi (j+1) t / L) + cos_coefs[j] cos(2 pi (j+1) t / L)
struct HarmonicModel {
  double intercept = 0.0;
  std::vector<double> sin_coefs;
  std::vector<double> cos_coefs;
  double period = 1.0;

  int num_freq() const { return static_cast<int>(sin_coefs.size()); }
  double operator()(double t) const;

  static HarmonicModel constant(double value, double period, int num_freq = 1);
  // c0 + c1 cos(2 pi t / L - phase), phase given in degrees.
  static HarmonicModel single_cosine(double c0, double c1, double period, double phase_deg);
};

struct FitDiagnostics {
  double residual_sd = 0.0;
  double rss = 0.0;
  int dof = 0;
};

struct HarmonicFit {
  HarmonicModel model;
  FitDiagnostics diagnostics;
};

// Row t (1-based) is [1, sin(2 pi t/L), cos(2 pi t/L), ..., sin(2 p pi t/L), cos(2 p pi t/L)].
Eigen::MatrixXd design_matrix(int season_len, int num_freq);
// Same column layout evaluated at arbitrary times.
Eigen::MatrixXd design_matrix_at(std::span<const double> times, double period, int num_freq);

/// OLS fit of a harmonic model to y observed at t = 1..L.
HarmonicFit fit_harmonic(std::span<const double> y, int num_freq, int season_len);
/// OLS fit at arbitrary sample times.
HarmonicFit fit_harmonic_at(std::span<const double> times, std::span<const double> y, int num_freq,
                            double period);

double eval_harmonic(const HarmonicModel& model, double t);

/// Harmonic model of the order-th time derivative, order in 1..4.
HarmonicModel derivative(const HarmonicModel& model, int order);

/// Phenological dates of c0 + c1 cos(2 pi t / L - phase) in closed form.
/// Sen equals Mat (flagged SenEqualsMat); GU, SoS, EoS and Dor are present only on their
/// phase intervals [180,360), [90,360), (0,270) and (0,180).
PhenoDates closed_form_phenodates(double c0, double c1, double period, double phase_deg);

}  // namespace phenocurve

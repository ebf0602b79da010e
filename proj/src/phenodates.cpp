#include "phenocurve/phenodates.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "phenocurve/errors.hpp"

namespace phenocurve {

namespace {

std::vector<double> sample(const HarmonicModel& model, const std::vector<double>& t) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = eval_harmonic(model, t[i]);
  return out;
}

// Earliest index of the largest value.
std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

// Interior strict-left local maxima: v[i-1] < v[i] >= v[i+1].
std::vector<std::size_t> interior_maxima(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) out.push_back(i);
  }
  return out;
}

// Best candidate other than `exclude`; `better(a, b)` is true when a beats b. Ties keep the
// earliest index.
template <typename Better>
std::optional<std::size_t> best_other(const std::vector<std::size_t>& candidates, std::size_t exclude,
                                      Better better) {
  std::optional<std::size_t> best;
  for (std::size_t i : candidates) {
    if (i == exclude) continue;
    if (!best || better(i, *best)) best = i;
  }
  return best;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

PhenoDates phenodates_from_model(const HarmonicModel& model, int dense_n) {
  require(dense_n >= 3, "phenodates: dense_n must be >= 3");
  require(model.period > 0.0, "phenodates: period must be positive");
  double amplitude = 0.0;
  for (std::size_t j = 0; j < model.sin_coefs.size(); ++j) {
    amplitude = std::max({amplitude, std::abs(model.sin_coefs[j]), std::abs(model.cos_coefs[j])});
  }
  if (amplitude <= 1e-10 * std::max(1.0, std::abs(model.intercept))) {
    throw Error(ErrorKind::DegenerateCurve, "phenodates: trend is constant, all derivatives vanish");
  }

  const double period = model.period;
  const double step = period / (dense_n - 1);
  std::vector<double> t(static_cast<std::size_t>(dense_n));
  for (int i = 0; i < dense_n; ++i) t[static_cast<std::size_t>(i)] = i * step;
  t.back() = period;

  const auto d1 = sample(derivative(model, 1), t);
  const auto d2 = sample(derivative(model, 2), t);
  const auto d3 = sample(derivative(model, 3), t);
  const auto d4 = sample(derivative(model, 4), t);

  PhenoDates out;
  out.period = period;
  std::array<std::optional<std::size_t>, 6> at{};
  auto idx = [](Phase p) { return static_cast<std::size_t>(p); };

  at[idx(Phase::StartOfSeason)] = argmax(d1);
  at[idx(Phase::EndOfSeason)] = argmin(d1);

  // Maturity is the global minimum of the second derivative; senescence the deepest other
  // interior local minimum.
  const std::size_t mat = argmin(d2);
  at[idx(Phase::Maturity)] = mat;
  std::vector<double> neg(d2.size());
  std::transform(d2.begin(), d2.end(), neg.begin(), [](double x) { return -x; });
  const auto minima = interior_maxima(neg);
  const auto sen = best_other(minima, mat, [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
  const bool mat_interior = mat > 0 && mat + 1 < d2.size();
  if (sen) {
    at[idx(Phase::Senescence)] = *sen;
  } else if (mat_interior) {
    at[idx(Phase::Senescence)] = mat;
    out.set(DateFlag::SenEqualsMat);
  } else {
    out.set(DateFlag::MissingSen);
  }

  // The global maximum of the second derivative is green-up when it precedes the start of
  // season and dormancy otherwise; the other role goes to the highest remaining interior maximum.
  const std::size_t top = argmax(d2);
  const auto maxima = interior_maxima(d2);
  const auto other = best_other(maxima, top, [&](std::size_t a, std::size_t b) { return d2[a] > d2[b]; });
  const std::size_t sos = *at[idx(Phase::StartOfSeason)];
  if (top <= sos) {
    at[idx(Phase::GreenUp)] = top;
    at[idx(Phase::Dormancy)] = other;
  } else {
    at[idx(Phase::Dormancy)] = top;
    at[idx(Phase::GreenUp)] = other;
  }
  if (!at[idx(Phase::GreenUp)]) out.set(DateFlag::MissingGU);
  if (!at[idx(Phase::Dormancy)]) out.set(DateFlag::MissingDor);

  for (Phase p : kPhases) {
    if (const auto i = at[idx(p)]) out[p] = PhenoDate{t[*i], to_doy(t[*i], period)};
  }

  // Derivative conditions: vanishing derivative within one grid step, then the tabled sign.
  const double tol3 = step * sup_abs(d4);
  const double tol2 = step * sup_abs(d3);
  auto check = [&](Phase p, bool ok) {
    if (at[idx(p)] && !ok) out.sign_failures.push_back(p);
  };
  auto v = [&](const std::vector<double>& d, Phase p) { return d[*at[idx(p)]]; };
  for (Phase p : kPhases) {
    if (!at[idx(p)]) continue;
    switch (p) {
      case Phase::GreenUp:
      case Phase::Dormancy:
        check(p, std::abs(v(d3, p)) <= tol3 && v(d4, p) < 0.0);
        break;
      case Phase::Maturity:
      case Phase::Senescence:
        check(p, std::abs(v(d3, p)) <= tol3 && v(d4, p) > 0.0);
        break;
      case Phase::StartOfSeason:
        check(p, std::abs(v(d2, p)) <= tol2 && v(d3, p) < 0.0);
        break;
      case Phase::EndOfSeason:
        check(p, std::abs(v(d2, p)) <= tol2 && v(d3, p) > 0.0);
        break;
    }
  }
  if (!out.sign_failures.empty()) out.set(DateFlag::SignConditionFailed);

  // A senescence date copied from maturity carries no ordering information.
  PhenoDates ordering = out;
  if (out.has(DateFlag::SenEqualsMat)) ordering[Phase::Senescence].reset();
  if (!check_ordering(ordering).ordered) out.set(DateFlag::OrderingViolated);
  return out;
}

PhenoDates extract_phenodates(const TrendCurve& trend, int num_freq, int dense_n) {
  require(num_freq >= 1, "extract_phenodates: num_freq must be >= 1");
  require(trend.grid_n() >= 3, "extract_phenodates: trend needs at least 3 samples");
  require(dense_n >= 10 * trend.grid_n(), "extract_phenodates: dense_n must be >= 10 * grid_n");
  require(trend.period > 0.0, "extract_phenodates: period must be positive");
  require(trend.values.allFinite(), "extract_phenodates: trend contains non-finite values");

  // x = 1 repeats x = 0 for a periodic model; drop it.
  const int n = trend.grid_n() - 1;
  std::vector<double> t(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    t[static_cast<std::size_t>(i)] = trend.period * i / (trend.grid_n() - 1);
    y[static_cast<std::size_t>(i)] = trend.values(i);
  }
  const auto fit = fit_harmonic_at(t, y, num_freq, trend.period);
  return phenodates_from_model(fit.model, dense_n);
}

}  // namespace phenocurve

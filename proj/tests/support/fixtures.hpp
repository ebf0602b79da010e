#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "phenocurve/clustering.hpp"
#include "phenocurve/dates.hpp"
#include "phenocurve/series.hpp"

namespace fixtures {

inline constexpr double kPi = std::numbers::pi;

// Exhaustive DTW: minimum over every monotone warping path from (0,0) to (n-1,m-1).
inline double brute_force_dtw(std::span<const double> a, std::span<const double> b,
                              phenocurve::DtwVariant variant) {
  const bool basic = variant == phenocurve::DtwVariant::Basic;
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double acc) {
    const double d = a[i] - b[j];
    acc += basic ? std::abs(d) : d * d;
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, acc);
    if (j + 1 < b.size()) walk(i, j + 1, acc);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return basic ? best : std::sqrt(best);
}

// Closed-form dates of c0 + c1 cos(2 pi t / L - phi), written independently of the library.
struct ReferenceDates {
  std::optional<double> gu, sos, mat, sen, eos, dor;
};

inline ReferenceDates reference_dates(double period, double phi) {
  ReferenceDates r;
  const double s = period / 360.0;
  if (phi >= 180.0) r.gu = (phi - 180.0) * s;
  if (phi >= 90.0) r.sos = (phi - 90.0) * s;
  r.mat = phi * s;
  r.sen = phi * s;
  if (phi < 270.0) r.eos = (phi + 90.0) * s;
  if (phi < 180.0) r.dor = (phi + 180.0) * s;
  return r;
}

inline std::optional<double> position(const phenocurve::PhenoDates& d, phenocurve::Phase p) {
  if (const auto& v = d[p]) return v->position;
  return std::nullopt;
}

// Single-cosine pixel with optional iid noise.
inline phenocurve::PixelSeries cosine_pixel(int period, int seasons, double phi, double sigma = 0.0,
                                            unsigned seed = 1) {
  phenocurve::PixelSeries s;
  s.grid = phenocurve::ObservationGrid::make(period, seasons);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
  for (int k = 0; k < seasons; ++k) {
    for (int t = 1; t <= period; ++t) {
      double v = std::cos(2.0 * kPi * t / period - phi * kPi / 180.0);
      if (sigma > 0.0) v += noise(rng);
      s.values.push_back(v);
    }
  }
  s.missing.assign(s.values.size(), false);
  return s;
}

// Asymmetric plateau season: fast green-up, slow senescence. With three harmonics its
// second derivative has two interior maxima and two interior minima, giving six ordered dates.
inline double grassland_value(double t) {
  const double c = 10.0;
  const double w = t < c ? 4.5 : 6.5;
  return 0.2 + 0.6 * std::exp(-std::pow(std::abs((t - c) / w), 3.0));
}

inline phenocurve::PixelSeries grassland_pixel(int seasons, double sigma, unsigned seed,
                                               double shift_days = 0.0) {
  const int period = 23;
  phenocurve::PixelSeries s;
  s.grid = phenocurve::ObservationGrid::make(period, seasons, 2000);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int k = 0; k < seasons; ++k) {
    for (int t = 1; t <= period; ++t) {
      s.values.push_back(grassland_value(t - shift_days) + sigma * noise(rng));
    }
  }
  s.missing.assign(s.values.size(), false);
  return s;
}

// Balanced-tag check: every opened element is closed in order; good enough for generated SVG.
inline bool well_formed_xml(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = doc.find('<', pos)) != std::string::npos) {
    const auto end = doc.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = doc.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      const auto name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    if (tag.back() == '/') continue;
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

}  // namespace fixtures

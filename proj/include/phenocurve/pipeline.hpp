#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phenocurve/basis.hpp"
#include "phenocurve/clustering.hpp"
#include "phenocurve/dates.hpp"
#include "phenocurve/fpca.hpp"
#include "phenocurve/series.hpp"

namespace phenocurve {

struct RunConfig {
  int num_freq = 3;                    // harmonics per season
  DtwVariant distance = DtwVariant::Basic;
  int h = 1;                           // principal components
  int samples = 50;                    // basis size K
  int grid_n = 365;                    // common grid for the annual curves
  int dense_n = 3650;                  // derivative grid for date extraction
  std::optional<int> dominating_threshold;  // default ceil(0.6 m)
  double trim_z = 1.96;
  double mad_scale = 1.4826;
  int workers = 1;
  std::uint64_t seed = 1;
  int max_iter = 200;
  double tol = 1e-6;
  double value_scale = 1.0;            // multiplies raw values before fitting
  std::optional<int> refit_num_freq;   // harmonics for the trend re-fit; num_freq when unset

  void validate() const;
  int trend_num_freq() const { return refit_num_freq.value_or(num_freq); }
};

struct PixelResult {
  PhenoDates dates;
  CurveMatrix curves;             // all usable annual curves on the common grid
  ClusterAssignment clusters;
  std::vector<std::size_t> used;  // columns of `curves` entering the FPCA
  FpcaFit fpca;
  TrendCurve trend;
};

/// Full per-pixel pipeline: split seasons, per-season harmonic fit, resampling, DTW clustering,
/// dominating-cluster selection, FPCA and date extraction. Errors carry the failing stage.
/// `basis` must match config.grid_n and config.samples.
PixelResult fit_pixel(const PixelSeries& series, const RunConfig& config, const BasisSet& basis);
PixelResult fit_pixel(const PixelSeries& series, const RunConfig& config);

}  // namespace phenocurve

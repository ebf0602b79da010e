#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phenocurve/harmonic.hpp"

namespace phenocurve {

struct ObservationGrid {
  int per_season_len = 0;  // L, composites per season
  int seasons = 0;         // S
  std::vector<std::string> season_labels;

  std::size_t size() const {
    return static_cast<std::size_t>(per_season_len) * static_cast<std::size_t>(seasons);
  }
  void validate() const;

  // Labels first_year, first_year+1, ... when first_year is given; "1".."S" otherwise.
  static ObservationGrid make(int per_season_len, int seasons, int first_year = 0);
};

struct PixelSeries {
  ObservationGrid grid;
  std::vector<double> values;  // length L*S, season-major
  std::vector<bool> missing;   // same length as values

  void validate() const;
  PixelSeries scaled(double factor) const;
};

// Common-grid matrix of smoothed annual curves: rows are grid points on [0, 1],
// columns are seasons. `period` is the season length L the grid maps onto.
struct CurveMatrix {
  Eigen::MatrixXd samples;
  std::vector<std::string> season_labels;
  double period = 1.0;

  int grid_n() const { return static_cast<int>(samples.rows()); }
  int curves() const { return static_cast<int>(samples.cols()); }
  CurveMatrix select(std::span<const std::size_t> columns) const;
};

/// Parses a single pixel row. `row_number` is used for error positions (1-based).
PixelSeries parse_pixel_row(std::span<const std::string> cells, const ObservationGrid& grid,
                            std::size_t row_number);

/// Reads the first data row of a pixel CSV (header optional, "NA" for missing).
PixelSeries load_pixel_csv(const std::filesystem::path& path, int season_len, int seasons,
                           int first_year = 0);

struct PolygonPixel {
  std::string id;
  PixelSeries series;
};

/// Reads a polygon CSV: one pixel per row, leading pixel-id column, then L*S values.
std::vector<PolygonPixel> load_polygon_csv(const std::filesystem::path& path, int season_len,
                                           int seasons, int first_year = 0);

struct SeasonSplit {
  std::vector<std::vector<double>> seasons;  // S vectors of length L, missing values imputed
  std::vector<bool> usable;                  // false when fewer than min_points observed
  std::vector<std::string> labels;

  std::size_t usable_count() const;
  std::vector<double> concatenated() const;
};

/// Splits a series into seasons and fills gaps by linear interpolation inside each season
/// (edge gaps take the nearest observed value). Seasons with fewer than 2p+1 observed values
/// are marked unusable; a fully missing season stays NaN.
SeasonSplit split_seasons(const PixelSeries& series, int num_freq);

/// Evaluates each model at t = x * L for x on an equally spaced grid of grid_n points on [0, 1].
CurveMatrix resample_curves(std::span<const HarmonicModel> models, int grid_n,
                            std::vector<std::string> labels = {});

}  // namespace phenocurve

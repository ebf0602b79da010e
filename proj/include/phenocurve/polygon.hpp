#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phenocurve/dates.hpp"
#include "phenocurve/pipeline.hpp"
#include "phenocurve/series.hpp"

namespace phenocurve {

struct PixelOutcome {
  std::string id;
  std::optional<PhenoDates> dates;  // empty when the pixel failed
  std::string error;                // stage-labelled message of the failure
};

struct ParameterSummary {
  std::optional<double> median_doy;  // over retained estimates
  std::optional<double> mad_days;    // unscaled median absolute deviation of retained estimates
  double outlier_fraction = 0.0;     // trimmed / available
  int available = 0;                 // pixels reporting the date
  int pixel_count = 0;               // retained after trimming
};

struct PolygonSummary {
  std::array<ParameterSummary, 6> parameters{};
  int total_pixels = 0;
  int failed_pixels = 0;
};

struct TrimResult {
  std::vector<double> retained;
  std::size_t trimmed = 0;
};

double median(std::vector<double> values);
double median_absolute_deviation(const std::vector<double>& values);

/// Single pass: keeps values within median +- z * scale * MAD.
TrimResult mad_trim(const std::vector<double>& values, double z, double scale);

PolygonSummary summarize_polygon(const std::vector<PixelOutcome>& pixels, double z, double scale);

struct PolygonResult {
  std::vector<PixelOutcome> pixels;  // input order
  PolygonSummary summary;
};

/// Runs the pixel pipeline on config.workers threads. Failed pixels are recorded and excluded
/// from the summary. Output does not depend on the worker count.
PolygonResult fit_polygon(const std::vector<PolygonPixel>& pixels, const RunConfig& config);

}  // namespace phenocurve

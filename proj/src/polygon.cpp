#include "phenocurve/polygon.hpp"

#include <algorithm>
#include <cmath>

#include "phenocurve/basis.hpp"
#include "phenocurve/errors.hpp"
#include "phenocurve/parallel.hpp"

namespace phenocurve {

double median(std::vector<double> values) {
  require(!values.empty(), "median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double median_absolute_deviation(const std::vector<double>& values) {
  const double m = median(values);
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(), [m](double v) { return std::abs(v - m); });
  return median(std::move(dev));
}

TrimResult mad_trim(const std::vector<double>& values, double z, double scale) {
  require(z > 0.0 && scale > 0.0, "mad_trim: z and scale must be positive");
  TrimResult out;
  if (values.empty()) return out;
  const double m = median(values);
  const double half_width = z * scale * median_absolute_deviation(values);
  for (double v : values) {
    if (std::abs(v - m) <= half_width) {
      out.retained.push_back(v);
    } else {
      ++out.trimmed;
    }
  }
  return out;
}

PolygonSummary summarize_polygon(const std::vector<PixelOutcome>& pixels, double z, double scale) {
  PolygonSummary summary;
  summary.total_pixels = static_cast<int>(pixels.size());
  for (const auto& p : pixels) {
    if (!p.dates) ++summary.failed_pixels;
  }
  for (Phase phase : kPhases) {
    std::vector<double> doys;
    for (const auto& p : pixels) {
      if (p.dates && (*p.dates)[phase]) doys.push_back((*p.dates)[phase]->doy);
    }
    auto& s = summary.parameters[static_cast<std::size_t>(phase)];
    s.available = static_cast<int>(doys.size());
    if (doys.empty()) continue;
    const auto trim = mad_trim(doys, z, scale);
    s.pixel_count = static_cast<int>(trim.retained.size());
    s.outlier_fraction = static_cast<double>(trim.trimmed) / static_cast<double>(doys.size());
    if (!trim.retained.empty()) {
      s.median_doy = median(trim.retained);
      s.mad_days = median_absolute_deviation(trim.retained);
    }
  }
  return summary;
}

PolygonResult fit_polygon(const std::vector<PolygonPixel>& pixels, const RunConfig& config) {
  config.validate();
  require(!pixels.empty(), "fit_polygon: no pixels");
  const auto basis = build_dr_basis(config.grid_n, config.samples);

  PolygonResult result;
  result.pixels.resize(pixels.size());
  parallel_for(pixels.size(), config.workers, [&](std::size_t i) {
    auto& out = result.pixels[i];
    out.id = pixels[i].id;
    try {
      out.dates = fit_pixel(pixels[i].series, config, basis).dates;
    } catch (const Error& e) {
      out.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  result.summary = summarize_polygon(result.pixels, config.trim_z, config.mad_scale);
  return result;
}

}  // namespace phenocurve

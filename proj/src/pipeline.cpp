#include "phenocurve/pipeline.hpp"

#include <string>

#include "phenocurve/errors.hpp"
#include "phenocurve/harmonic.hpp"
#include "phenocurve/phenodates.hpp"

namespace phenocurve {

void RunConfig::validate() const {
  require(num_freq >= 1, "num-freq must be >= 1");
  require(h >= 1, "h must be >= 1");
  require(samples >= 4, "samples must be >= 4");
  require(grid_n >= 3, "grid-n must be >= 3");
  require(dense_n >= 10 * grid_n, "dense-n must be >= 10 * grid-n");
  require(!dominating_threshold || *dominating_threshold >= 1, "dominating-threshold must be >= 1");
  require(trim_z > 0.0, "trim-z must be positive");
  require(mad_scale > 0.0, "mad-scale must be positive");
  require(workers >= 1, "workers must be >= 1");
  require(max_iter >= 1, "max-iter must be >= 1");
  require(tol > 0.0, "tol must be positive");
  require(value_scale > 0.0, "value-scale must be positive");
  require(!refit_num_freq || *refit_num_freq >= 1, "refit-num-freq must be >= 1");
}

namespace {

template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw with_stage(e, name);
  }
}

}  // namespace

PixelResult fit_pixel(const PixelSeries& series, const RunConfig& config, const BasisSet& basis) {
  config.validate();
  require(basis.grid_n() == config.grid_n && basis.size() == config.samples,
          "fit_pixel: basis does not match grid-n/samples");

  const PixelSeries scaled = config.value_scale == 1.0 ? series : series.scaled(config.value_scale);
  const auto split = stage("split", [&] { return split_seasons(scaled, config.num_freq); });

  PixelResult result;
  result.curves = stage("season-fit", [&] {
    std::vector<HarmonicModel> models;
    std::vector<std::string> labels;
    const int len = scaled.grid.per_season_len;
    for (std::size_t s = 0; s < split.seasons.size(); ++s) {
      if (!split.usable[s]) continue;
      models.push_back(fit_harmonic(split.seasons[s], config.num_freq, len).model);
      labels.push_back(split.labels[s]);
    }
    if (models.size() < 2) {
      throw Error(ErrorKind::MalformedInput,
                  "fewer than two seasons have enough observations for num-freq " +
                      std::to_string(config.num_freq));
    }
    return resample_curves(models, config.grid_n, labels);
  });

  const auto distances = stage("cluster", [&] {
    return pairwise_distances(result.curves, config.distance, 1);
  });
  result.clusters = hierarchical_two_cluster(distances);
  const int threshold =
      config.dominating_threshold.value_or(default_dominating_threshold(result.curves.curves()));
  if (auto members = select_dominating(result.clusters, threshold); members && members->size() >= 2) {
    result.used = std::move(*members);
  } else {
    result.used.clear();
    for (int j = 0; j < result.curves.curves(); ++j) result.used.push_back(static_cast<std::size_t>(j));
  }

  const CurveMatrix subset = result.curves.select(result.used);
  result.fpca = stage("fpca", [&] {
    const int h = std::min({config.h, subset.curves(), basis.size()});
    return fpca_fit(subset, basis, h, config.max_iter, config.tol);
  });
  result.trend = predict_trend(result.fpca, basis);
  result.dates = stage("phenodates", [&] {
    return extract_phenodates(result.trend, config.trend_num_freq(), config.dense_n);
  });
  return result;
}

PixelResult fit_pixel(const PixelSeries& series, const RunConfig& config) {
  config.validate();
  const auto basis = build_dr_basis(config.grid_n, config.samples);
  return fit_pixel(series, config, basis);
}

}  // namespace phenocurve

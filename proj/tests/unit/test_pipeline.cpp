#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "phenocurve/errors.hpp"
#include "phenocurve/pipeline.hpp"

using namespace phenocurve;

namespace {

RunConfig grass_config() {
  RunConfig c;
  c.num_freq = 3;
  return c;
}

}  // namespace

TEST_CASE("grassland-like cube yields six ordered dates") {
  const auto series = fixtures::grassland_pixel(24, 0.01, 3);
  const auto r = fit_pixel(series, grass_config());
  for (Phase p : kPhases) CHECK(r.dates[p].has_value());
  CHECK_FALSE(r.dates.has(DateFlag::OrderingViolated));
  CHECK(r.fpca.converged);
  CHECK(r.curves.curves() == 24);
}

TEST_CASE("five anomalous years are left out of the trend") {
  auto series = fixtures::grassland_pixel(24, 0.01, 4);
  const std::set<int> anomalous = {2015, 2016, 2017, 2019, 2020};
  const auto shifted = fixtures::grassland_pixel(24, 0.01, 5, 6.0);
  for (int s = 0; s < 24; ++s) {
    if (!anomalous.count(2000 + s)) continue;
    for (int t = 0; t < 23; ++t) {
      series.values[static_cast<std::size_t>(s * 23 + t)] = 0.5 * shifted.values[static_cast<std::size_t>(s * 23 + t)];
    }
  }
  auto config = grass_config();
  config.dominating_threshold = 15;
  const auto r = fit_pixel(series, config);
  REQUIRE(r.clusters.dominating);
  CHECK(r.used.size() == 19);
  for (std::size_t c : r.used) CHECK_FALSE(anomalous.count(std::stoi(r.curves.season_labels[c])));
}

TEST_CASE("no dominating cluster means all curves are used") {
  // Two equally sized regimes: neither cluster reaches the threshold.
  auto series = fixtures::grassland_pixel(24, 0.01, 6);
  const auto shifted = fixtures::grassland_pixel(24, 0.01, 7, 6.0);
  for (int s = 0; s < 11; ++s) {
    for (int t = 0; t < 23; ++t) {
      series.values[static_cast<std::size_t>(s * 23 + t)] = shifted.values[static_cast<std::size_t>(s * 23 + t)];
    }
  }
  auto config = grass_config();
  config.dominating_threshold = 15;
  const auto r = fit_pixel(series, config);
  CHECK_FALSE(r.clusters.dominating);
  CHECK(r.used.size() == 24);
}

TEST_CASE("constant cube fails in date extraction") {
  PixelSeries s;
  s.grid = ObservationGrid::make(23, 24);
  s.values.assign(552, 0.3);
  s.missing.assign(552, false);
  try {
    fit_pixel(s, grass_config());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateCurve);
    CHECK(std::string(e.what()).rfind("phenodates:", 0) == 0);
    CHECK(exit_code(e.kind()) == 3);
  }
}

TEST_CASE("too few usable seasons is an input error") {
  auto s = fixtures::cosine_pixel(23, 3, 210);
  for (std::size_t i = 0; i < 46; ++i) s.missing[i] = true;
  try {
    fit_pixel(s, grass_config());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedInput);
    CHECK(exit_code(e.kind()) == 2);
  }
}

TEST_CASE("value scale is applied before fitting") {
  const auto base = fixtures::grassland_pixel(6, 0.0, 1);
  auto raw = base.scaled(1e4);
  auto config = grass_config();
  config.value_scale = 1e-4;
  const auto a = fit_pixel(base, grass_config());
  const auto b = fit_pixel(raw, config);
  for (Phase p : kPhases) {
    REQUIRE(a.dates[p].has_value() == b.dates[p].has_value());
    if (a.dates[p]) CHECK(a.dates[p]->doy == b.dates[p]->doy);
  }
}

TEST_CASE("run config validation") {
  RunConfig c;
  c.dense_n = 100;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.workers = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  CHECK_NOTHROW(c.validate());
  CHECK(c.trend_num_freq() == 3);
  c.refit_num_freq = 2;
  CHECK(c.trend_num_freq() == 2);
}

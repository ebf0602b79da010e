#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "phenocurve/errors.hpp"
#include "phenocurve/series.hpp"

using namespace phenocurve;

namespace {

std::vector<std::string> cells(int n, const std::string& v = "0.5") { return std::vector<std::string>(n, v); }

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("phenocurve_" + name);
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("parse_pixel_row accepts L*S cells") {
  const auto grid = ObservationGrid::make(23, 24);
  const auto row = cells(552);
  const auto s = parse_pixel_row(row, grid, 1);
  CHECK(s.values.size() == 552);
  CHECK(s.grid.seasons == 24);
}

TEST_CASE("two seasons is the smallest valid series") {
  const auto s = parse_pixel_row(cells(46), ObservationGrid::make(23, 2), 1);
  CHECK(s.values.size() == 46);
  CHECK_THROWS_AS(ObservationGrid::make(23, 1).validate(), Error);
  CHECK_THROWS_AS(ObservationGrid::make(2, 5).validate(), Error);
}

TEST_CASE("row length mismatch is malformed input") {
  try {
    parse_pixel_row(cells(551), ObservationGrid::make(23, 24), 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedInput);
  }
}

TEST_CASE("unparseable cell reports row and column") {
  auto row = cells(46);
  row[9] = "abc";
  try {
    parse_pixel_row(row, ObservationGrid::make(23, 2), 4);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 4);
    CHECK(e.column() == 10);
  }
}

TEST_CASE("NA marks a missing observation") {
  auto row = cells(46);
  row[5] = "NA";
  const auto s = parse_pixel_row(row, ObservationGrid::make(23, 2), 1);
  CHECK(s.missing[5]);
  CHECK_FALSE(s.missing[4]);
}

TEST_CASE("pixel CSV with and without header") {
  std::string header, data;
  for (int i = 0; i < 46; ++i) {
    header += (i ? "," : "") + std::string("t") + std::to_string(i);
    data += (i ? "," : "") + std::to_string(0.01 * i);
  }
  const auto with = load_pixel_csv(temp_file("hdr.csv", header + "\n" + data + "\n"), 23, 2);
  const auto without = load_pixel_csv(temp_file("nohdr.csv", data + "\n"), 23, 2);
  CHECK(with.values == without.values);
  CHECK(with.values[45] == doctest::Approx(0.45));
}

TEST_CASE("polygon CSV keeps ids and shifts error columns past the id") {
  std::string text;
  for (int p = 0; p < 3; ++p) {
    text += "px" + std::to_string(p);
    for (int i = 0; i < 46; ++i) text += ",0.3";
    text += "\n";
  }
  const auto pixels = load_polygon_csv(temp_file("poly.csv", text), 23, 2);
  REQUIRE(pixels.size() == 3);
  CHECK(pixels[2].id == "px2");

  std::string bad = "a";
  for (int i = 0; i < 46; ++i) bad += i == 2 ? ",x" : ",0.3";
  try {
    load_polygon_csv(temp_file("poly_bad.csv", bad + "\n"), 23, 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 4);  // id column, then cells 1..2 before the bad one
  }
}

TEST_CASE("split_seasons segments and imputes") {
  PixelSeries s;
  s.grid = ObservationGrid::make(23, 24);
  for (int i = 0; i < 552; ++i) s.values.push_back(std::sin(0.1 * i));
  s.missing.assign(552, false);

  SUBCASE("24 vectors of length 23 that concatenate back") {
    const auto split = split_seasons(s, 1);
    REQUIRE(split.seasons.size() == 24);
    for (const auto& v : split.seasons) CHECK(v.size() == 23);
    CHECK(split.concatenated() == s.values);
  }
  SUBCASE("interior gap takes the neighbour mean") {
    // t = 5 in the first season is index 4.
    s.missing[4] = true;
    s.values[4] = 99.0;
    const auto split = split_seasons(s, 1);
    CHECK(split.seasons[0][4] == doctest::Approx(0.5 * (s.values[3] + s.values[5])));
    CHECK(split.seasons[0][3] == s.values[3]);
  }
  SUBCASE("edge gaps take the nearest observed value") {
    s.missing[0] = s.missing[1] = true;
    s.missing[22] = true;
    const auto split = split_seasons(s, 1);
    CHECK(split.seasons[0][0] == s.values[2]);
    CHECK(split.seasons[0][1] == s.values[2]);
    CHECK(split.seasons[0][22] == s.values[21]);
  }
  SUBCASE("fully missing season is unusable") {
    for (int t = 23; t < 46; ++t) s.missing[static_cast<std::size_t>(t)] = true;
    const auto split = split_seasons(s, 1);
    CHECK_FALSE(split.usable[1]);
    CHECK(split.usable_count() == 23);
  }
  SUBCASE("fewer than 2p+1 observations is unusable") {
    for (int t = 0; t < 23; ++t) s.missing[static_cast<std::size_t>(t)] = t >= 6;
    CHECK_FALSE(split_seasons(s, 3).usable[0]);  // 6 observed, 7 needed
    CHECK(split_seasons(s, 2).usable[0]);
  }
}

TEST_CASE("imputation never alters observed values (property)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution miss(0.3);
  for (int rep = 0; rep < 50; ++rep) {
    PixelSeries s;
    s.grid = ObservationGrid::make(7, 4);
    for (int i = 0; i < 28; ++i) {
      s.values.push_back(u(rng));
      s.missing.push_back(miss(rng));
    }
    const auto flat = split_seasons(s, 1).concatenated();
    for (std::size_t i = 0; i < flat.size(); ++i) {
      if (!s.missing[i]) CHECK(flat[i] == s.values[i]);
    }
  }
}

TEST_CASE("resample_curves") {
  SUBCASE("constant model") {
    const std::vector<HarmonicModel> m = {HarmonicModel::constant(0.5, 23)};
    const auto c = resample_curves(m, 365);
    CHECK(c.grid_n() == 365);
    CHECK((c.samples.array() == 0.5).all());
  }
  SUBCASE("single harmonic at five grid points") {
    const std::vector<HarmonicModel> m = {HarmonicModel::single_cosine(0.0, 1.0, 23, 210)};
    const auto c = resample_curves(m, 5);
    for (int i = 0; i < 5; ++i) {
      const double x = i / 4.0;
      CHECK(c.samples(i, 0) == doctest::Approx(std::cos(2 * fixtures::kPi * x - 210 * fixtures::kPi / 180)).epsilon(1e-12));
    }
  }
  SUBCASE("identical models give identical columns, deterministically") {
    const auto m = HarmonicModel::single_cosine(0.1, 0.4, 23, 150);
    const std::vector<HarmonicModel> ms = {m, m};
    const auto a = resample_curves(ms, 50);
    const auto b = resample_curves(ms, 50);
    CHECK(a.samples.col(0) == a.samples.col(1));
    CHECK(a.samples == b.samples);
  }
  SUBCASE("mixed periods are rejected") {
    const std::vector<HarmonicModel> ms = {HarmonicModel::constant(0, 23), HarmonicModel::constant(0, 24)};
    CHECK_THROWS_AS(resample_curves(ms, 10), Error);
  }
}

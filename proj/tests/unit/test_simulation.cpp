#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phenocurve/errors.hpp"
#include "phenocurve/simulation.hpp"

using namespace phenocurve;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.reps = 4;
  c.seed = 11;
  c.estimator.num_freq = 1;
  return c;
}

}  // namespace

TEST_CASE("base signal has 552 observations") {
  const auto s = gen_base(SimConfig{});
  CHECK(s.values.size() == 552);
  CHECK(s.values[0] == doctest::Approx(std::cos(2 * std::numbers::pi / 23 - 210 * std::numbers::pi / 180)));
  CHECK(s.values[23] == s.values[0]);
}

TEST_CASE("homoscedastic noise variance") {
  SimConfig c;
  c.noise.sigma = 0.15;
  const auto base = gen_base(c);
  // Per-position variance over 1000 draws, averaged across positions.
  std::vector<double> sum(552, 0.0), sum2(552, 0.0);
  for (int r = 0; r < 1000; ++r) {
    RngStream rng(3, static_cast<std::uint64_t>(r));
    const auto s = gen_homoscedastic(c, rng);
    for (std::size_t i = 0; i < 552; ++i) {
      const double e = s.values[i] - base.values[i];
      sum[i] += e;
      sum2[i] += e * e;
    }
  }
  double var = 0.0;
  for (std::size_t i = 0; i < 552; ++i) var += (sum2[i] - sum[i] * sum[i] / 1000.0) / 999.0;
  var /= 552.0;
  CHECK(std::abs(var - 0.0225) <= 0.1 * 0.0225);
}

TEST_CASE("generators are deterministic per stream") {
  SimConfig c;
  RngStream a(5, 2), b(5, 2), other(5, 3);
  const auto x = gen_homoscedastic(c, a);
  CHECK(x.values == gen_homoscedastic(c, b).values);
  CHECK(x.values != gen_homoscedastic(c, other).values);
}

TEST_CASE("heteroscedastic structure") {
  SimConfig c;
  c.noise.kind = NoiseKind::Heteroscedastic;
  c.noise.df = 1;
  RngStream rng(9, 0);
  const auto s = gen_heteroscedastic(c, rng);
  const auto base = gen_base(c);
  // Noise = season shift + per-position chi-square offset: differences between two seasons are
  // constant within the season pair.
  std::vector<double> e(552);
  for (std::size_t i = 0; i < 552; ++i) e[i] = s.values[i] - base.values[i];
  for (int k = 1; k < 24; ++k) {
    const double d0 = e[static_cast<std::size_t>(k * 23)] - e[0];
    for (int t = 1; t < 23; ++t) {
      CHECK(e[static_cast<std::size_t>(k * 23 + t)] - e[static_cast<std::size_t>(t)] == doctest::Approx(d0).epsilon(1e-9));
    }
  }
  SUBCASE("no season shift and large df: offsets concentrate near df") {
    c.noise.season_sd = 0.0;
    c.noise.df = 400;
    RngStream r2(1, 1);
    const auto big = gen_heteroscedastic(c, r2);
    for (std::size_t i = 0; i < 23; ++i) {
      const double off = big.values[i] - base.values[i];
      CHECK(off > 300);
      CHECK(off < 500);
      CHECK(big.values[i + 23] - base.values[i + 23] == doctest::Approx(off));
    }
  }
}

TEST_CASE("study determinism and worker invariance") {
  auto c = small_config();
  const auto a = run_study(c);
  c.estimator.workers = 3;
  const auto b = run_study(c);
  REQUIRE(a.rows.size() == 1);
  for (int k = 0; k < 4; ++k) CHECK(a.rows[0].mse[k] == b.rows[0].mse[k]);
  for (double m : a.rows[0].mse) CHECK(m >= 0.0);
}

TEST_CASE("noiseless control is bounded by the grid step") {
  auto c = small_config();
  c.noise.kind = NoiseKind::None;
  c.reps = 2;
  const auto t = run_study(c);
  const double step = 23.0 / c.estimator.dense_n;
  for (double m : t.rows[0].mse) CHECK(m <= step * step);
  CHECK(t.rows[0].failures == 0);
}

TEST_CASE("single rep gives one squared error per date") {
  auto c = small_config();
  c.reps = 1;
  const auto t = run_study(c);
  CHECK(t.rows[0].reps == 1);
  for (int e : t.rows[0].excluded) CHECK(e == 0);
}

TEST_CASE("study config parsing") {
  const auto configs = parse_study_config(R"({
    "reps": 10, "seed": 3,
    "noise": [{"kind": "homoscedastic", "sigma": 0.15}, {"kind": "heteroscedastic", "df": 1}],
    "estimators": [{"num_freq": 1, "distance": "dtw_basic"}, {"num_freq": 1, "distance": "dtw2"}]
  })");
  REQUIRE(configs.size() == 4);
  CHECK(configs[1].estimator.distance == DtwVariant::L2);
  CHECK(configs[2].noise.kind == NoiseKind::Heteroscedastic);
  CHECK(configs[2].noise.season_sd == doctest::Approx(0.7229));
  CHECK(configs[0].seasons == 24);

  auto field_of = [](const std::string& text) {
    try {
      parse_study_config(text);
    } catch (const SchemaError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of(R"({"reps": 0, "noise": {"kind": "homoscedastic"}})") == "reps");
  CHECK(field_of(R"({"noise": {"kind": "gaussian"}})") == "noise.kind");
  CHECK(field_of(R"({"noise": [{"kind": "homoscedastic", "sigma": -1}]})") == "noise[0].sigma");
  CHECK(field_of(R"({"noise": {"kind": "none"}, "estimators": [{"distance": "euclid"}]})") == "estimators[0].distance");
  CHECK(field_of(R"({"noise": {"kind": "none"}, "colour": 1})") == "colour");
  CHECK(field_of(R"({"reps": 5})") == "noise");
  CHECK(field_of("not json") == "<document>");
}

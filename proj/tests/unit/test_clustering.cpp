#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "phenocurve/clustering.hpp"
#include "phenocurve/errors.hpp"

using namespace phenocurve;

namespace {

CurveMatrix points(const std::vector<double>& xs) {
  CurveMatrix c;
  c.samples = Eigen::Map<const Eigen::RowVectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  c.period = 1.0;
  return c;
}

}  // namespace

TEST_CASE("dtw examples") {
  const std::vector<double> x = {0.3, 1.2, -0.5, 0.0};
  CHECK(dtw_distance(x, x, DtwVariant::Basic) == 0.0);
  CHECK(dtw_distance(x, x, DtwVariant::L2) == 0.0);

  const std::vector<double> a = {0, 0}, b = {1, 1};
  CHECK(dtw_distance(a, b, DtwVariant::Basic) == 2.0);
  CHECK(fixtures::brute_force_dtw(a, b, DtwVariant::Basic) == 2.0);

  const std::vector<double> c = {0, 1, 2}, d = {0, 2};
  CHECK(dtw_distance(c, d, DtwVariant::Basic) == 1.0);
  CHECK(fixtures::brute_force_dtw(c, d, DtwVariant::Basic) == 1.0);

  const std::vector<double> empty;
  CHECK_THROWS_AS(dtw_distance(empty, a, DtwVariant::Basic), Error);
}

TEST_CASE("dtw equals exhaustive path enumeration (property)") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_int_distribution<int> val(-4, 4);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
    for (double& v : a) v = 0.5 * val(rng);
    for (double& v : b) v = 0.5 * val(rng);
    for (auto variant : {DtwVariant::Basic, DtwVariant::L2}) {
      CHECK(dtw_distance(a, b, variant) == fixtures::brute_force_dtw(a, b, variant));
    }
  }
}

TEST_CASE("dtw bounds (property)") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(12), b(12);
    for (double& v : a) v = n(rng);
    for (double& v : b) v = n(rng);
    const double basic = dtw_distance(a, b, DtwVariant::Basic);
    CHECK(basic >= std::abs(a.front() - b.front()));
    CHECK(basic >= std::abs(a.back() - b.back()));
    double diag1 = 0, diag2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diag1 += std::abs(a[i] - b[i]);
      diag2 += (a[i] - b[i]) * (a[i] - b[i]);
    }
    CHECK(basic <= diag1 + 1e-12);
    CHECK(dtw_distance(a, b, DtwVariant::L2) <= std::sqrt(diag2) + 1e-12);
    CHECK(dtw_distance(a, b, DtwVariant::Basic) == dtw_distance(b, a, DtwVariant::Basic));
  }
}

TEST_CASE("variant names") {
  CHECK(parse_dtw_variant("dtw_basic") == DtwVariant::Basic);
  CHECK(parse_dtw_variant("dtw2") == DtwVariant::L2);
  CHECK_FALSE(parse_dtw_variant("euclid"));
  CHECK(to_string(DtwVariant::L2) == "dtw2");
}

TEST_CASE("pairwise distances") {
  SUBCASE("identical columns") {
    CurveMatrix c;
    c.samples = Eigen::MatrixXd::Ones(10, 2);
    CHECK(pairwise_distances(c, DtwVariant::Basic).d.isZero());
  }
  SUBCASE("symmetric with zero diagonal and matches direct calls, any worker count") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    CurveMatrix c;
    c.samples.resize(15, 6);
    for (Eigen::Index i = 0; i < c.samples.size(); ++i) c.samples.data()[i] = n(rng);
    const auto d1 = pairwise_distances(c, DtwVariant::L2, 1);
    const auto d3 = pairwise_distances(c, DtwVariant::L2, 3);
    CHECK(d1.d == d3.d);
    CHECK(d1.d == d1.d.transpose());
    CHECK(d1.d.diagonal().isZero());
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const Eigen::VectorXd a = c.samples.col(i), b = c.samples.col(j);
        CHECK(d1.d(i, j) == dtw_distance({a.data(), 15}, {b.data(), 15}, DtwVariant::L2));
      }
    }
  }
  SUBCASE("single curve is rejected") {
    CurveMatrix c;
    c.samples = Eigen::MatrixXd::Ones(4, 1);
    CHECK_THROWS_AS(pairwise_distances(c, DtwVariant::Basic), Error);
  }
}

TEST_CASE("two-cluster examples") {
  SUBCASE("three points") {
    const auto a = hierarchical_two_cluster(pairwise_distances(points({0.0, 0.1, 10.0}), DtwVariant::Basic));
    CHECK(a.labels == std::vector<int>{1, 1, 2});
  }
  SUBCASE("three points: brute force over the two-cluster partitions") {
    // Average linkage stops after one merge, so the pair with the smallest distance forms a
    // cluster; enumerate the three partitions {i,j}|{k} and pick the one with the closest pair.
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int rep = 0; rep < 50; ++rep) {
      const std::vector<double> xs = {u(rng), u(rng), u(rng)};
      int single = 0;
      double best = 1e300;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        const double d = std::abs(xs[i] - xs[j]);
        if (d < best) best = d, single = k;
      }
      const auto a = hierarchical_two_cluster(pairwise_distances(points(xs), DtwVariant::Basic));
      for (int k = 0; k < 3; ++k) {
        if (k != single) CHECK(a.labels[k] != a.labels[single]);
      }
    }
  }
  SUBCASE("two curves are singletons") {
    const auto a = hierarchical_two_cluster(pairwise_distances(points({1.0, 2.0}), DtwVariant::Basic));
    CHECK(a.labels == std::vector<int>{1, 2});
  }
  SUBCASE("identical curves: tie rule leaves the last one alone") {
    const auto a = hierarchical_two_cluster(pairwise_distances(points(std::vector<double>(7, 0.4)), DtwVariant::Basic));
    CHECK(a.sizes() == std::array<std::size_t, 2>{6, 1});
    CHECK(a.labels.back() == 2);
  }
}

TEST_CASE("clustering is permutation equivariant (property)") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> xs(9);
    for (double& v : xs) v = n(rng) + (rep % 2 ? 0.0 : 5.0 * (n(rng) > 0));
    std::vector<std::size_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> ys(9);
    for (std::size_t i = 0; i < 9; ++i) ys[i] = xs[perm[i]];
    const auto a = hierarchical_two_cluster(pairwise_distances(points(xs), DtwVariant::Basic));
    const auto b = hierarchical_two_cluster(pairwise_distances(points(ys), DtwVariant::Basic));
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t j = 0; j < 9; ++j) {
        CHECK((a.labels[perm[i]] == a.labels[perm[j]]) == (b.labels[i] == b.labels[j]));
      }
    }
  }
}

TEST_CASE("dominating cluster selection") {
  auto make = [](int first, int second) {
    ClusterAssignment a;
    a.labels.assign(static_cast<std::size_t>(first), 1);
    a.labels.insert(a.labels.end(), static_cast<std::size_t>(second), 2);
    return a;
  };
  SUBCASE("19 and 5") {
    auto a = make(19, 5);
    const auto m = select_dominating(a, 15);
    REQUIRE(m);
    CHECK(m->size() == 19);
    CHECK(a.dominating == 1);
  }
  SUBCASE("13 and 11") {
    auto a = make(13, 11);
    CHECK_FALSE(select_dominating(a, 15));
    CHECK_FALSE(a.dominating);
  }
  SUBCASE("1 and 23") {
    auto a = make(1, 23);
    const auto m = select_dominating(a, 15);
    REQUIRE(m);
    CHECK(m->size() == 23);
    CHECK(a.dominating == 2);
  }
  CHECK(default_dominating_threshold(24) == 15);
  CHECK(default_dominating_threshold(10) == 6);
}

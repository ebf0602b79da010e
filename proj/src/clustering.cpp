#include "phenocurve/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phenocurve/errors.hpp"
#include "phenocurve/parallel.hpp"

namespace phenocurve {

std::string_view to_string(DtwVariant variant) {
  return variant == DtwVariant::Basic ? "dtw_basic" : "dtw2";
}

std::optional<DtwVariant> parse_dtw_variant(std::string_view name) {
  if (name == "dtw_basic" || name == "basic") return DtwVariant::Basic;
  if (name == "dtw2" || name == "l2") return DtwVariant::L2;
  return std::nullopt;
}

double dtw_distance(std::span<const double> a, std::span<const double> b, DtwVariant variant) {
  require(!a.empty() && !b.empty(), "dtw_distance: series must be non-empty");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  auto local = [variant](double x, double y) {
    const double diff = x - y;
    return variant == DtwVariant::Basic ? std::abs(diff) : diff * diff;
  };

  // Two rolling rows of the accumulated-cost table.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m, inf);
  std::vector<double> curr(m, inf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double cost = local(a[i], b[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = inf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      curr[j] = cost + best;
    }
    std::swap(prev, curr);
  }
  const double total = prev[m - 1];
  return variant == DtwVariant::Basic ? total : std::sqrt(total);
}

DistanceMatrix pairwise_distances(const CurveMatrix& curves, DtwVariant variant, int workers) {
  const auto m = static_cast<std::size_t>(curves.curves());
  require(m >= 2, "pairwise_distances: need at least two curves");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }

  // Contiguous copies keep the DP's inner loop on plain spans.
  std::vector<std::vector<double>> columns(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = curves.samples.col(static_cast<Eigen::Index>(j));
    columns[j].assign(col.data(), col.data() + col.size());
  }

  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    values[k] = dtw_distance(columns[pairs[k].first], columns[pairs[k].second], variant);
  });

  DistanceMatrix out;
  out.variant = variant;
  out.d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(pairs[k].first);
    const auto j = static_cast<Eigen::Index>(pairs[k].second);
    out.d(i, j) = values[k];
    out.d(j, i) = values[k];
  }
  return out;
}

std::array<std::size_t, 2> ClusterAssignment::sizes() const {
  std::array<std::size_t, 2> s{0, 0};
  for (int l : labels) ++s[static_cast<std::size_t>(l - 1)];
  return s;
}

std::vector<std::size_t> ClusterAssignment::members(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

ClusterAssignment hierarchical_two_cluster(const DistanceMatrix& distances) {
  const auto m = static_cast<std::size_t>(distances.d.rows());
  require(distances.d.cols() == distances.d.rows(), "hierarchical_two_cluster: matrix not square");
  require(m >= 1, "hierarchical_two_cluster: empty distance matrix");

  // Each cluster keeps its members sorted; clusters stay sorted by their smallest member.
  std::vector<std::vector<std::size_t>> clusters(m);
  for (std::size_t i = 0; i < m; ++i) clusters[i] = {i};

  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0;
    for (std::size_t i : a) {
      for (std::size_t j : b) {
        sum += distances.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    return sum / static_cast<double>(a.size() * b.size());
  };

  while (clusters.size() > 2) {
    std::size_t best_a = 0;
    std::size_t best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double l = linkage(clusters[a], clusters[b]);
        if (l < best) {
          best = l;
          best_a = a;
          best_b = b;
        }
      }
    }
    auto& target = clusters[best_a];
    target.insert(target.end(), clusters[best_b].begin(), clusters[best_b].end());
    std::sort(target.begin(), target.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
  }

  ClusterAssignment out;
  out.labels.assign(m, 1);
  if (clusters.size() == 2) {
    for (std::size_t i : clusters[1]) out.labels[i] = 2;
  }
  return out;
}

std::optional<std::vector<std::size_t>> select_dominating(ClusterAssignment& assignment, int threshold) {
  require(threshold >= 1, "select_dominating: threshold must be >= 1");
  assignment.dominating_threshold = threshold;
  assignment.dominating.reset();
  const auto sizes = assignment.sizes();
  const int larger = sizes[1] > sizes[0] ? 2 : 1;
  if (sizes[static_cast<std::size_t>(larger - 1)] < static_cast<std::size_t>(threshold)) {
    return std::nullopt;
  }
  assignment.dominating = larger;
  return assignment.members(larger);
}

int default_dominating_threshold(int curves) {
  return static_cast<int>(std::ceil(0.6 * curves - 1e-9));
}

}  // namespace phenocurve

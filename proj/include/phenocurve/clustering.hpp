#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phenocurve/series.hpp"

namespace phenocurve {

// Basic: local cost |a_i - b_j|, accumulated. L2: local cost (a_i - b_j)^2, square root of the
// accumulated cost. Both use the symmetric step pattern without a window.
enum class DtwVariant { Basic, L2 };

std::string_view to_string(DtwVariant variant);          // "dtw_basic" / "dtw2"
std::optional<DtwVariant> parse_dtw_variant(std::string_view name);

double dtw_distance(std::span<const double> a, std::span<const double> b, DtwVariant variant);

struct DistanceMatrix {
  Eigen::MatrixXd d;
  DtwVariant variant = DtwVariant::Basic;
};

/// DTW distance between every pair of columns; pairs are spread over `workers` threads.
DistanceMatrix pairwise_distances(const CurveMatrix& curves, DtwVariant variant, int workers = 1);

struct ClusterAssignment {
  std::vector<int> labels;         // 1 or 2 per curve; the cluster holding curve 0 is label 1
  std::optional<int> dominating;   // set by select_dominating
  int dominating_threshold = 0;

  std::array<std::size_t, 2> sizes() const;
  std::vector<std::size_t> members(int label) const;
};

/// Average-linkage agglomeration down to two clusters. Equal linkage values are resolved in
/// favour of the lexicographically smallest pair of cluster ids (a cluster's id is its smallest
/// member index).
ClusterAssignment hierarchical_two_cluster(const DistanceMatrix& distances);

/// Members of the larger cluster when it has at least `threshold` curves; nullopt otherwise.
/// Records the decision in `assignment`.
std::optional<std::vector<std::size_t>> select_dominating(ClusterAssignment& assignment, int threshold);

// ceil(0.6 * m): 15 of 24 curves.
int default_dominating_threshold(int curves);

}  // namespace phenocurve

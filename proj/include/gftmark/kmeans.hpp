#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gftmark/watermark.hpp"

namespace gftmark {

/// Converged two-class partition of scalar values.
struct TwoMeansResult {
  std::vector<std::uint8_t> labels;  // 1 = larger centroid
  double low_centroid = 0.0;
  double high_centroid = 0.0;
  double cost = 0.0;  // within-cluster sum of squares
  int iterations = 0;
  bool degenerate = false;  // fewer than two distinct values
};

/// Lloyd iterations from the given centroids. Equidistant points join the
/// lower-centroid cluster.
TwoMeansResult lloyd_two_means(std::span<const double> values, double low, double high,
                               const KMeansOptions& opts);

/// Two-class K-means: Lloyd from the min/max seed and from the best split of
/// the sorted values, whichever fixed point has lower cost.
TwoMeansResult two_means(std::span<const double> values, const KMeansOptions& opts = {});

double within_cluster_cost(std::span<const double> values, std::span<const std::uint8_t> labels);

}  // namespace gftmark

#include "gftmark/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gftmark {

namespace {

struct ClusterMeans {
  double low;
  double high;
};

ClusterMeans means_of(std::span<const double> values, std::span<const std::uint8_t> labels,
                      ClusterMeans fallback) {
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum[labels[i]] += values[i];
    ++count[labels[i]];
  }
  return {count[0] ? sum[0] / static_cast<double>(count[0]) : fallback.low,
          count[1] ? sum[1] / static_cast<double>(count[1]) : fallback.high};
}

void assign(std::span<const double> values, ClusterMeans c, std::vector<std::uint8_t>& labels) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    labels[i] = std::abs(values[i] - c.high) < std::abs(values[i] - c.low) ? 1 : 0;
  }
}

// Centroids of the contiguous split of the sorted values with the smallest
// within-cluster sum of squares. Values are centered first to limit
// cancellation in the running sums.
ClusterMeans best_sorted_split(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  double total = 0.0;
  double total_sq = 0.0;
  for (double& v : sorted) {
    v -= mean;
    total += v;
    total_sq += v * v;
  }

  double left = 0.0;
  double left_sq = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  ClusterMeans best{sorted.front() + mean, sorted.back() + mean};
  for (std::size_t s = 1; s < n; ++s) {
    left += sorted[s - 1];
    left_sq += sorted[s - 1] * sorted[s - 1];
    if (!(sorted[s - 1] < sorted[s])) {
      continue;
    }
    const double nl = static_cast<double>(s);
    const double nr = static_cast<double>(n - s);
    const double right = total - left;
    const double right_sq = total_sq - left_sq;
    const double cost = (left_sq - left * left / nl) + (right_sq - right * right / nr);
    if (cost < best_cost) {
      best_cost = cost;
      best = {left / nl + mean, right / nr + mean};
    }
  }
  return best;
}

}  // namespace

double within_cluster_cost(std::span<const double> values, std::span<const std::uint8_t> labels) {
  const ClusterMeans c = means_of(values, labels, {0.0, 0.0});
  double cost = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - (labels[i] ? c.high : c.low);
    cost += d * d;
  }
  return cost;
}

TwoMeansResult lloyd_two_means(std::span<const double> values, double low, double high,
                               const KMeansOptions& opts) {
  TwoMeansResult r;
  r.labels.assign(values.size(), 0);
  if (!(low < high)) {
    r.degenerate = true;
    r.low_centroid = r.high_centroid = low;
    r.cost = within_cluster_cost(values, r.labels);
    return r;
  }

  ClusterMeans c{low, high};
  std::vector<std::uint8_t> previous;
  assign(values, c, r.labels);
  for (r.iterations = 1; r.iterations <= opts.max_iterations; ++r.iterations) {
    const ClusterMeans next = means_of(values, r.labels, c);
    const double scale = std::max(std::abs(next.low), std::abs(next.high));
    const double moved = std::max(std::abs(next.low - c.low), std::abs(next.high - c.high));
    c = next;
    previous = r.labels;
    assign(values, c, r.labels);
    if (r.labels == previous || moved <= opts.tolerance * scale) {
      break;
    }
  }
  r.iterations = std::min(r.iterations, opts.max_iterations);

  const ClusterMeans final_means = means_of(values, r.labels, c);
  r.low_centroid = final_means.low;
  r.high_centroid = final_means.high;
  r.cost = within_cluster_cost(values, r.labels);
  return r;
}

TwoMeansResult two_means(std::span<const double> values, const KMeansOptions& opts) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("two_means: non-finite feature value");
    }
  }
  if (values.size() < 2) {
    TwoMeansResult r;
    r.labels.assign(values.size(), 0);
    r.degenerate = true;
    return r;
  }

  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  TwoMeansResult from_extremes = lloyd_two_means(values, *lo, *hi, opts);
  if (from_extremes.degenerate) {
    return from_extremes;
  }

  // Lloyd can stall in a local optimum in 1-D; the global optimum is always a
  // contiguous split of the sorted values.
  const ClusterMeans split = best_sorted_split(values);
  TwoMeansResult from_split = lloyd_two_means(values, split.low, split.high, opts);
  return from_split.cost < from_extremes.cost ? from_split : from_extremes;
}

}  // namespace gftmark

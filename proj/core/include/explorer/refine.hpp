#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "explorer/core.hpp"

namespace explorer {

using Cluster = std::vector<std::size_t>;

struct RefineParams {
  std::size_t k = 5;
  double rate = 0.5;
  std::size_t resample_points = kDefaultResamplePoints;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Euclidean distance between the flattened, resampled state trajectories.
double trace_distance(const DataTrace& a, const DataTrace& b,
                      std::size_t resample_points = kDefaultResamplePoints);

/// Symmetric pairwise distance matrix.
Matrix distance_matrix(std::span<const DataTrace> traces,
                       std::size_t resample_points = kDefaultResamplePoints);

/// Lloyd's algorithm with k-means++ seeding over resampled trajectories.
/// Returns k non-empty index sets ordered by their smallest member. When
/// there are fewer traces than k, k is reduced (with a warning).
std::vector<Cluster> kmeans_traces(std::span<const DataTrace> traces, std::size_t k, std::uint64_t seed,
                                   std::size_t resample_points = kDefaultResamplePoints);

/// Same clustering on precomputed feature rows (one row per item).
std::vector<Cluster> kmeans_rows(const Matrix& features, std::size_t k, std::uint64_t seed);

/// ceil(rate * count), clamped to [1, count].
std::size_t selection_count(std::size_t count, double rate);

/// Max-min dissimilar subset of `count` items under `distances`. Small
/// instances are solved exactly (lexicographically first optimal subset);
/// larger ones by farthest-point greedy started from the farthest pair.
/// Returned indices are sorted.
std::vector<std::size_t> select_dissimilar(const Matrix& distances, std::size_t count);

/// Same, on traces and a selection rate.
std::vector<std::size_t> select_dissimilar(std::span<const DataTrace> traces, double rate,
                                           std::size_t resample_points = kDefaultResamplePoints);

/// Smallest pairwise distance within `subset` (infinity below two items).
double min_pairwise_distance(const Matrix& distances, std::span<const std::size_t> subset);

/// Upper bound on C(n, k) for which select_dissimilar enumerates exactly.
inline constexpr std::size_t kExactSelectionLimit = 50000;

struct RefineResult {
  /// Indices into the input, sorted.
  std::vector<std::size_t> selected;
  /// Cluster partition of the input indices.
  std::vector<Cluster> clusters;
  /// Per-cluster selected indices (subset of the matching cluster).
  std::vector<Cluster> selected_by_cluster;
};

/// K-means followed by per-cluster dissimilar selection.
RefineResult refine_training_data(std::span<const DataTrace> traces, const RefineParams& params);

/// CSV `trace,cluster` for a partition.
std::string cluster_assignment_csv(std::span<const Cluster> clusters);

}  // namespace explorer

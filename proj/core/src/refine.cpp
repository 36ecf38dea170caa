#include "explorer/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "explorer/error.hpp"

namespace explorer {

namespace {

Matrix trajectory_features(std::span<const DataTrace> traces, std::size_t points) {
  const auto n = traces.front().state_dim();
  Matrix rows(static_cast<Eigen::Index>(traces.size()), static_cast<Eigen::Index>(n * points));
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].state_dim() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "traces differ in state dimension");
    }
    rows.row(static_cast<Eigen::Index>(i)) = flatten_trajectory(resample_trajectory(traces[i], points)).transpose();
  }
  return rows;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::vector<std::size_t> exact_max_min(const Matrix& dist, std::size_t count) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::size_t> comb(count);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::size_t> best = comb;
  double best_value = -1.0;
  while (true) {
    const double v = min_pairwise_distance(dist, comb);
    if (v > best_value) {
      best_value = v;
      best = comb;
    }
    // Next combination in lexicographic order.
    std::size_t i = count;
    while (i > 0 && comb[i - 1] == n - count + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < count; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

std::vector<std::size_t> greedy_max_min(const Matrix& dist, std::size_t count) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::size_t a = 0;
  std::size_t b = 1;
  double far = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j) > far) {
        far = dist(i, j);
        a = i;
        b = j;
      }
    }
  }
  std::vector<std::size_t> chosen{a};
  if (count >= 2) chosen.push_back(b);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (auto c : chosen) {
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist(i, c));
  }
  std::vector<bool> taken(n, false);
  for (auto c : chosen) taken[c] = true;
  while (chosen.size() < count) {
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i] && nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    chosen.push_back(best);
    taken[best] = true;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist(i, best));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

void RefineParams::validate() const {
  if (k < 1) throw Error(ErrorCode::kConfig, "cluster count must be at least 1");
  if (!(rate > 0.0 && rate <= 1.0)) throw Error(ErrorCode::kConfig, "selection rate must lie in (0, 1]");
  if (resample_points < 2) throw Error(ErrorCode::kConfig, "resample_points must be at least 2");
}

double trace_distance(const DataTrace& a, const DataTrace& b, std::size_t resample_points) {
  if (a.state_dim() != b.state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "traces differ in state dimension");
  }
  const Vector fa = flatten_trajectory(resample_trajectory(a, resample_points));
  const Vector fb = flatten_trajectory(resample_trajectory(b, resample_points));
  return (fa - fb).norm();
}

Matrix distance_matrix(std::span<const DataTrace> traces, std::size_t resample_points) {
  const auto n = static_cast<Eigen::Index>(traces.size());
  Matrix dist = Matrix::Zero(n, n);
  if (n == 0) return dist;
  const Matrix features = trajectory_features(traces, resample_points);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (features.row(i) - features.row(j)).norm();
    }
  }
  return dist;
}

std::vector<Cluster> kmeans_rows(const Matrix& features, std::size_t k, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (n == 0) throw Error(ErrorCode::kEmptyData, "k-means over an empty set");
  if (k == 0) throw Error(ErrorCode::kConfig, "cluster count must be at least 1");
  if (n < k) {
    spdlog::warn("k-means: {} items for {} clusters, reducing k to {}", n, k, n);
    k = n;
  }
  const auto row = [&](std::size_t i) { return features.row(static_cast<Eigen::Index>(i)); };

  // k-means++ seeding.
  std::mt19937_64 rng(seed);
  Matrix centroids(static_cast<Eigen::Index>(k), features.cols());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centroids.row(0) = row(pick(rng));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (row(i) - centroids.row(static_cast<Eigen::Index>(c - 1))).squaredNorm());
      total += d2[i];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        r -= d2[i];
        if (r < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = c;  // all items coincide with existing centroids
    }
    centroids.row(static_cast<Eigen::Index>(c)) = row(chosen);
  }

  std::vector<std::size_t> assign(n, k);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (row(i) - centroids.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    // Empty-cluster repair: reseed at the item farthest from its centroid.
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assign) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] <= 1) continue;
        const double d = (row(i) - centroids.row(static_cast<Eigen::Index>(assign[i]))).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[assign[far]];
      assign[far] = c;
      sizes[c] = 1;
      changed = true;
    }
    centroids.setZero();
    for (std::size_t i = 0; i < n; ++i) centroids.row(static_cast<Eigen::Index>(assign[i])) += row(i);
    for (std::size_t c = 0; c < k; ++c) centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
    if (!changed) break;
  }

  std::vector<Cluster> clusters(k);
  for (std::size_t i = 0; i < n; ++i) clusters[assign[i]].push_back(i);
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
  return clusters;
}

std::vector<Cluster> kmeans_traces(std::span<const DataTrace> traces, std::size_t k, std::uint64_t seed,
                                   std::size_t resample_points) {
  if (traces.empty()) throw Error(ErrorCode::kEmptyData, "k-means over an empty trace set");
  return kmeans_rows(trajectory_features(traces, resample_points), k, seed);
}

std::size_t selection_count(std::size_t count, double rate) {
  const auto c = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(count) - 1e-12));
  return std::clamp<std::size_t>(c, 1, count);
}

double min_pairwise_distance(const Matrix& distances, std::span<const std::size_t> subset) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      best = std::min(best, distances(static_cast<Eigen::Index>(subset[i]), static_cast<Eigen::Index>(subset[j])));
    }
  }
  return best;
}

std::vector<std::size_t> select_dissimilar(const Matrix& distances, std::size_t count) {
  const auto n = static_cast<std::size_t>(distances.rows());
  if (n == 0) throw Error(ErrorCode::kEmptyData, "dissimilar selection from an empty cluster");
  count = std::clamp<std::size_t>(count, 1, n);
  if (count == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  if (n == 1) return {0};
  if (count == 1) {
    auto pair = greedy_max_min(distances, 2);
    return {pair.front()};
  }
  if (binomial(n, count) <= static_cast<double>(kExactSelectionLimit)) return exact_max_min(distances, count);
  return greedy_max_min(distances, count);
}

std::vector<std::size_t> select_dissimilar(std::span<const DataTrace> traces, double rate,
                                           std::size_t resample_points) {
  if (traces.empty()) throw Error(ErrorCode::kEmptyData, "dissimilar selection from an empty cluster");
  return select_dissimilar(distance_matrix(traces, resample_points), selection_count(traces.size(), rate));
}

RefineResult refine_training_data(std::span<const DataTrace> traces, const RefineParams& params) {
  params.validate();
  if (traces.empty()) throw Error(ErrorCode::kEmptyData, "refinement of an empty trace set");
  const Matrix features = trajectory_features(traces, params.resample_points);

  RefineResult result;
  result.clusters = kmeans_rows(features, params.k, params.seed);
  for (const auto& cluster : result.clusters) {
    const auto m = static_cast<Eigen::Index>(cluster.size());
    Matrix dist = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        dist(i, j) = dist(j, i) =
            (features.row(static_cast<Eigen::Index>(cluster[static_cast<std::size_t>(i)])) -
             features.row(static_cast<Eigen::Index>(cluster[static_cast<std::size_t>(j)])))
                .norm();
      }
    }
    Cluster picked;
    for (auto local : select_dissimilar(dist, selection_count(cluster.size(), params.rate))) {
      picked.push_back(cluster[local]);
    }
    std::sort(picked.begin(), picked.end());
    result.selected.insert(result.selected.end(), picked.begin(), picked.end());
    result.selected_by_cluster.push_back(std::move(picked));
  }
  std::sort(result.selected.begin(), result.selected.end());
  return result;
}

std::string cluster_assignment_csv(std::span<const Cluster> clusters) {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto i : clusters[c]) rows.emplace_back(i, c);
  }
  std::sort(rows.begin(), rows.end());
  std::string text = "trace,cluster\n";
  for (const auto& [i, c] : rows) text += std::to_string(i) + "," + std::to_string(c) + "\n";
  return text;
}

}  // namespace explorer

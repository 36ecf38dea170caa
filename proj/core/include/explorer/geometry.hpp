#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "explorer/core.hpp"
#include "explorer/coverage.hpp"

namespace explorer {

/// Axis-aligned bound over a point set.
struct BoxBound {
  std::vector<Interval> axes;

  std::size_t dim() const { return axes.size(); }
  /// True when some axis has zero width.
  bool degenerate() const;
  bool contains(const Vector& p) const;
  double volume() const;
  /// Axis-wise intersection; the result may be degenerate.
  BoxBound intersect(std::span<const Interval> limits) const;
};

/// Per-axis min/max, each side pushed outward by margin * (max - min).
BoxBound box_bound(std::span<const Vector> points, double margin);

inline constexpr double kDefaultBoxMargin = 0.05;
inline constexpr std::size_t kMaxRegionGenerators = 512;

/// Convex hull of a cluster, kept in V-representation. Containment is a
/// distance-to-hull query answered by Wolfe's minimum-norm-point algorithm.
class ConvexRegion {
 public:
  explicit ConvexRegion(std::span<const Vector> points,
                        std::size_t max_generators = kMaxRegionGenerators);

  std::size_t dim() const { return static_cast<std::size_t>(generators_.rows()); }
  std::size_t generator_count() const { return static_cast<std::size_t>(generators_.cols()); }
  /// dim x count, one generator per column.
  const Matrix& generators() const { return generators_; }

  /// Fewer than dim+1 generators, or generators not affinely spanning R^dim.
  bool degenerate() const { return degenerate_; }
  /// Fewer than dim+1 generators: the region is just its points.
  bool point_set() const { return point_set_; }

  /// Euclidean distance from p to the region.
  double distance(const Vector& p) const;
  bool contains(const Vector& p, double eps) const;

 private:
  Matrix generators_;
  Vector lower_;
  Vector upper_;
  bool degenerate_ = false;
  bool point_set_ = false;
};

/// One region per cluster of projected points.
std::vector<ConvexRegion> build_regions(std::span<const std::vector<Vector>> clusters);

bool contains(const ConvexRegion& region, const Vector& p, double eps);

/// Distance from `p` to conv(columns of `points`) via the minimum-norm-point
/// algorithm. `points` must have at least one column.
double distance_to_hull(const Matrix& points, const Vector& p);

/// Greedy max-min subsample, starting from the point farthest from the
/// centroid. Returns indices in selection order.
std::vector<std::size_t> farthest_point_subsample(std::span<const Vector> points, std::size_t count);

/// CSV `cluster,c0..c{d-1}` of every generator.
std::string regions_csv(std::span<const ConvexRegion> regions);

}  // namespace explorer

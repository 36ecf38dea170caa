#include "explorer/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "explorer/error.hpp"
#include "explorer/io.hpp"

namespace explorer {

bool BoxBound::degenerate() const {
  return std::any_of(axes.begin(), axes.end(), [](const Interval& a) { return !(a.width() > 0.0); });
}

bool BoxBound::contains(const Vector& p) const {
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (!axes[d].contains(p[static_cast<Eigen::Index>(d)])) return false;
  }
  return true;
}

double BoxBound::volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= std::max(0.0, a.width());
  return v;
}

BoxBound BoxBound::intersect(std::span<const Interval> limits) const {
  if (limits.size() != axes.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "box intersection with mismatched dimension");
  }
  BoxBound out = *this;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    out.axes[d].low = std::max(axes[d].low, limits[d].low);
    out.axes[d].high = std::max(out.axes[d].low, std::min(axes[d].high, limits[d].high));
  }
  return out;
}

BoxBound box_bound(std::span<const Vector> points, double margin) {
  if (points.empty()) throw Error(ErrorCode::kEmptyData, "box bound of an empty point set");
  const auto dim = points.front().size();
  Vector lo = points.front();
  Vector hi = points.front();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "box bound over mixed dimensions");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  BoxBound box;
  for (Eigen::Index d = 0; d < dim; ++d) {
    const double pad = margin * (hi[d] - lo[d]);
    box.axes.push_back({lo[d] - pad, hi[d] + pad});
  }
  return box;
}

std::vector<std::size_t> farthest_point_subsample(std::span<const Vector> points, std::size_t count) {
  const auto n = points.size();
  if (n == 0 || count == 0) return {};
  if (count >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  Vector centroid = Vector::Zero(points.front().size());
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);

  std::size_t start = 0;
  double far = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (points[i] - centroid).squaredNorm();
    if (d > far) {
      far = d;
      start = i;
    }
  }
  std::vector<std::size_t> chosen{start};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < count) {
    const auto& last = points[chosen.back()];
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], (points[i] - last).squaredNorm());
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

double distance_to_hull(const Matrix& points, const Vector& p) {
  const auto n = points.cols();
  if (n == 0) throw Error(ErrorCode::kEmptyData, "distance to an empty hull");
  const Matrix shifted = points.colwise() - p;
  const Vector sq = shifted.colwise().squaredNorm();
  const double scale = std::max(sq.maxCoeff(), std::numeric_limits<double>::min());
  const double tol_gap = 1e-12 * scale;
  constexpr double kWeightTol = 1e-12;

  // Corral: active column indices with convex weights.
  std::vector<Eigen::Index> active;
  std::vector<double> weights;
  Eigen::Index j0 = 0;
  sq.minCoeff(&j0);
  active.push_back(j0);
  weights.push_back(1.0);
  Vector x = shifted.col(j0);

  for (int major = 0; major < 10000; ++major) {
    Eigen::Index j = 0;
    const Vector dots = shifted.transpose() * x;
    dots.minCoeff(&j);
    if (x.squaredNorm() - dots[j] <= tol_gap) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    weights.push_back(0.0);

    for (int minor = 0; minor < 10000; ++minor) {
      // Affine minimiser of the corral: min ||P a|| s.t. sum(a) = 1.
      const auto k = static_cast<Eigen::Index>(active.size());
      Matrix P(shifted.rows(), k);
      for (Eigen::Index i = 0; i < k; ++i) P.col(i) = shifted.col(active[static_cast<std::size_t>(i)]);
      Matrix kkt = Matrix::Zero(k + 1, k + 1);
      kkt.topLeftCorner(k, k) = P.transpose() * P;
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      Vector rhs = Vector::Zero(k + 1);
      rhs[k] = 1.0;
      const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const Vector alpha = sol.head(k);

      if (alpha.minCoeff() > kWeightTol) {
        for (Eigen::Index i = 0; i < k; ++i) weights[static_cast<std::size_t>(i)] = alpha[i];
        x = P * alpha;
        break;
      }
      // Step toward the affine minimiser until a weight hits zero.
      double theta = 1.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double w = weights[static_cast<std::size_t>(i)];
        if (alpha[i] <= kWeightTol && w - alpha[i] > 0.0) theta = std::min(theta, w / (w - alpha[i]));
      }
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_w;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double w = theta * alpha[i] + (1.0 - theta) * weights[static_cast<std::size_t>(i)];
        if (w > kWeightTol) {
          kept.push_back(active[static_cast<std::size_t>(i)]);
          kept_w.push_back(w);
        }
      }
      if (kept.empty()) {
        // Numerical collapse: restart from the best single vertex of the corral.
        kept.push_back(active.back());
        kept_w.push_back(1.0);
      }
      double total = 0.0;
      for (double w : kept_w) total += w;
      for (double& w : kept_w) w /= total;
      active = std::move(kept);
      weights = std::move(kept_w);
      x.setZero();
      for (std::size_t i = 0; i < active.size(); ++i) x += weights[i] * shifted.col(active[i]);
    }
  }
  return x.norm();
}

ConvexRegion::ConvexRegion(std::span<const Vector> points, std::size_t max_generators) {
  if (points.empty()) throw Error(ErrorCode::kEmptyData, "convex region of an empty cluster");
  const auto dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "cluster mixes point dimensions");
  }
  const auto keep = farthest_point_subsample(points, max_generators);
  generators_.resize(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) generators_.col(static_cast<Eigen::Index>(i)) = points[keep[i]];
  lower_ = generators_.rowwise().minCoeff();
  upper_ = generators_.rowwise().maxCoeff();

  point_set_ = generator_count() < static_cast<std::size_t>(dim) + 1;
  if (point_set_) {
    degenerate_ = true;
  } else {
    const Matrix diffs = generators_.rightCols(generators_.cols() - 1).colwise() - generators_.col(0);
    Eigen::ColPivHouseholderQR<Matrix> qr(diffs);
    const double extent = std::max((upper_ - lower_).maxCoeff(), 1.0);
    qr.setThreshold(1e-10 * extent);
    degenerate_ = qr.rank() < dim;
  }
}

double ConvexRegion::distance(const Vector& p) const {
  if (static_cast<std::size_t>(p.size()) != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "containment query dimension differs from the region");
  }
  if (point_set_) return (generators_.colwise() - p).colwise().norm().minCoeff();
  return distance_to_hull(generators_, p);
}

bool ConvexRegion::contains(const Vector& p, double eps) const {
  if (static_cast<std::size_t>(p.size()) != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "containment query dimension differs from the region");
  }
  // The bounding box is a superset of the hull: outside it by more than eps
  // means outside the hull by more than eps.
  const Vector below = (lower_ - p).cwiseMax(0.0);
  const Vector above = (p - upper_).cwiseMax(0.0);
  if ((below + above).norm() > eps) return false;
  return distance(p) <= eps;
}

std::vector<ConvexRegion> build_regions(std::span<const std::vector<Vector>> clusters) {
  std::vector<ConvexRegion> regions;
  regions.reserve(clusters.size());
  for (const auto& c : clusters) regions.emplace_back(c);
  return regions;
}

bool contains(const ConvexRegion& region, const Vector& p, double eps) { return region.contains(p, eps); }

std::string regions_csv(std::span<const ConvexRegion> regions) {
  std::string text = "cluster";
  const auto dim = regions.empty() ? 0 : regions.front().dim();
  for (std::size_t d = 0; d < dim; ++d) text += ",c" + std::to_string(d);
  text += '\n';
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& g = regions[r].generators();
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      text += std::to_string(r);
      for (Eigen::Index d = 0; d < g.rows(); ++d) text += ',' + format_number(g(d, c));
      text += '\n';
    }
  }
  return text;
}

}  // namespace explorer

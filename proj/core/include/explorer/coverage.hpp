#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "explorer/core.hpp"

namespace explorer {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  double width() const { return high - low; }
  bool contains(double v) const { return v >= low && v <= high; }
};

/// Objective space: which state coordinates are measured, the exploration
/// limits B, the kernel standard deviation and the integration resolution.
struct ObjectiveSpace {
  std::vector<std::size_t> projection;
  std::vector<Interval> bounds;
  double sigma = 0.0;
  std::size_t cells_per_dim = 0;

  std::size_t dim() const { return projection.size(); }

  /// Throws ErrorCode::kConfig when an invariant is violated. With
  /// `state_dim`, projection indices are also checked against it.
  void validate(std::optional<std::size_t> state_dim = std::nullopt) const;

  /// Fills sigma / cells_per_dim with their defaults when left at zero.
  static ObjectiveSpace make(std::vector<std::size_t> projection, std::vector<Interval> bounds,
                             double sigma = 0.0, std::size_t cells_per_dim = 0);
};

/// 3% of the narrowest bound.
double default_sigma(std::span<const Interval> bounds);
/// 256 / 128 / 48 cells per axis for 1 / 2 / 3 dimensions.
std::size_t default_cells_per_dim(std::size_t dim);

/// Objective spaces with more dimensions than this are integrated by Halton
/// quasi-Monte Carlo instead of a lattice.
inline constexpr std::size_t kMaxLatticeDim = 3;
inline constexpr std::size_t kHaltonSamples = 200000;

/// Selects the objective coordinates of a state, unscaled.
Vector project(const ObjectiveSpace& space, const State& state);

/// Running max of isotropic Gaussian kernels N(P(y), sigma^2 I) evaluated at
/// fixed evaluation points (cell centres for dim <= 3, Halton points above).
/// Single writer; concurrent const access is safe between insertions.
class OccupancyField {
 public:
  explicit OccupancyField(ObjectiveSpace space);

  const ObjectiveSpace& space() const { return space_; }
  std::size_t inserted_count() const { return inserted_count_; }
  bool uses_lattice() const { return space_.dim() <= kMaxLatticeDim; }

  /// (2 pi sigma^2)^(-dim/2).
  double kernel_peak() const { return peak_; }

  /// Projects each state and max-accumulates its kernel.
  void insert(std::span<const State> states);
  /// Same as insert() for points already in objective coordinates.
  void insert_points(std::span<const Vector> points);

  /// Midpoint-rule (or QMC) integral of the field over the bounds.
  double score() const;

  /// Field value at the cell holding `point`, divided by the kernel peak.
  /// Throws ErrorCode::kOutOfBounds outside the bounds.
  double occupancy_at(const Vector& point) const;
  /// occupancy_at() after clamping `point` into the bounds.
  double occupancy_clamped(const Vector& point) const;

  std::size_t point_count() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  Vector evaluation_point(std::size_t index) const;
  /// Lattice cell index for an in-bounds point.
  std::size_t cell_index(const Vector& point) const;

  /// CSV `c0..c{d-1},value` of every evaluation point.
  std::string snapshot_csv() const;

 private:
  void insert_lattice(const Vector& y);
  void insert_scattered(const Vector& y);
  double max_kernel_at(const Vector& point) const;

  ObjectiveSpace space_;
  double peak_ = 0.0;
  std::vector<double> values_;
  std::vector<std::vector<double>> centers_;  // per-axis cell centres (lattice)
  std::vector<Vector> halton_;                // evaluation points (scattered)
  std::vector<Vector> absorbed_;              // inserted points (scattered)
  std::size_t inserted_count_ = 0;
};

/// Functional forms of the field operations.
OccupancyField insert_states(OccupancyField field, std::span<const State> states);
double coverage_score(const OccupancyField& field);
double occupancy_at(const OccupancyField& field, const Vector& point);

/// Score of a state set in a fresh field over `space`.
double coverage_score_of(const ObjectiveSpace& space, std::span<const State> states);

/// i-th point (0-based) of the Halton sequence in [0,1)^dim.
Vector halton_point(std::size_t index, std::size_t dim);

}  // namespace explorer

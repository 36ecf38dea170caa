#include "explorer/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "explorer/error.hpp"
#include "explorer/io.hpp"

namespace explorer {

namespace {

// Per-axis kernel factors below this are not written into the field.
constexpr double kKernelCutoff = 1e-20;

constexpr std::size_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                   31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

}  // namespace

void ObjectiveSpace::validate(std::optional<std::size_t> state_dim) const {
  if (projection.empty()) throw Error(ErrorCode::kConfig, "objective space needs at least one dimension");
  if (bounds.size() != projection.size()) {
    throw Error(ErrorCode::kConfig, "objective bounds and projection differ in length");
  }
  for (const auto& b : bounds) {
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || !(b.low < b.high)) {
      throw Error(ErrorCode::kConfig, "objective bounds need finite low < high");
    }
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::kConfig, "kernel sigma must be positive");
  if (dim() <= kMaxLatticeDim && cells_per_dim < 10) {
    throw Error(ErrorCode::kConfig, "cells_per_dim must be at least 10");
  }
  if (dim() > std::size(kPrimes)) throw Error(ErrorCode::kConfig, "objective space dimension too large");
  if (state_dim) {
    for (auto idx : projection) {
      if (idx >= *state_dim) {
        throw Error(ErrorCode::kConfig, "projection index " + std::to_string(idx) +
                                            " out of range for state dimension " +
                                            std::to_string(*state_dim));
      }
    }
  }
}

ObjectiveSpace ObjectiveSpace::make(std::vector<std::size_t> projection, std::vector<Interval> bounds,
                                    double sigma, std::size_t cells_per_dim) {
  ObjectiveSpace space;
  space.projection = std::move(projection);
  space.bounds = std::move(bounds);
  space.sigma = sigma > 0.0 ? sigma : default_sigma(space.bounds);
  space.cells_per_dim = cells_per_dim > 0 ? cells_per_dim : default_cells_per_dim(space.projection.size());
  space.validate();
  return space;
}

double default_sigma(std::span<const Interval> bounds) {
  double narrowest = std::numeric_limits<double>::infinity();
  for (const auto& b : bounds) narrowest = std::min(narrowest, b.width());
  return 0.03 * narrowest;
}

std::size_t default_cells_per_dim(std::size_t dim) {
  switch (dim) {
    case 1: return 256;
    case 2: return 128;
    case 3: return 48;
    default: return 10;  // unused: scattered integration
  }
}

Vector project(const ObjectiveSpace& space, const State& state) {
  Vector out(static_cast<Eigen::Index>(space.dim()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto idx = space.projection[i];
    if (idx >= static_cast<std::size_t>(state.size())) {
      throw Error(ErrorCode::kProjection, "projection index " + std::to_string(idx) +
                                              " out of range for a state of dimension " +
                                              std::to_string(state.size()));
    }
    out[static_cast<Eigen::Index>(i)] = state[static_cast<Eigen::Index>(idx)];
  }
  return out;
}

Vector halton_point(std::size_t index, std::size_t dim) {
  Vector p(static_cast<Eigen::Index>(dim));
  for (std::size_t d = 0; d < dim; ++d) {
    const auto base = kPrimes[d];
    double f = 1.0;
    double r = 0.0;
    // Skip index 0 (the origin) so every point is interior.
    std::size_t i = index + 1;
    while (i > 0) {
      f /= static_cast<double>(base);
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    p[static_cast<Eigen::Index>(d)] = r;
  }
  return p;
}

OccupancyField::OccupancyField(ObjectiveSpace space) : space_(std::move(space)) {
  space_.validate();
  const auto dim = space_.dim();
  peak_ = std::pow(2.0 * std::numbers::pi * space_.sigma * space_.sigma, -0.5 * static_cast<double>(dim));
  if (uses_lattice()) {
    const auto cells = space_.cells_per_dim;
    centers_.resize(dim);
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim; ++d) {
      const auto& b = space_.bounds[d];
      const double h = b.width() / static_cast<double>(cells);
      centers_[d].resize(cells);
      for (std::size_t i = 0; i < cells; ++i) centers_[d][i] = b.low + (static_cast<double>(i) + 0.5) * h;
      total *= cells;
    }
    values_.assign(total, 0.0);
  } else {
    halton_.reserve(kHaltonSamples);
    for (std::size_t i = 0; i < kHaltonSamples; ++i) {
      Vector u = halton_point(i, dim);
      for (std::size_t d = 0; d < dim; ++d) {
        const auto& b = space_.bounds[d];
        u[static_cast<Eigen::Index>(d)] = b.low + u[static_cast<Eigen::Index>(d)] * b.width();
      }
      halton_.push_back(std::move(u));
    }
    values_.assign(kHaltonSamples, 0.0);
  }
}

void OccupancyField::insert(std::span<const State> states) {
  for (const auto& s : states) {
    const Vector y = project(space_, s);
    if (uses_lattice()) {
      insert_lattice(y);
    } else {
      insert_scattered(y);
    }
    ++inserted_count_;
  }
}

void OccupancyField::insert_points(std::span<const Vector> points) {
  for (const auto& y : points) {
    if (static_cast<std::size_t>(y.size()) != space_.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from the objective space");
    }
    if (uses_lattice()) {
      insert_lattice(y);
    } else {
      insert_scattered(y);
    }
    ++inserted_count_;
  }
}

void OccupancyField::insert_lattice(const Vector& y) {
  const auto dim = space_.dim();
  const auto cells = space_.cells_per_dim;
  const double inv_two_var = 1.0 / (2.0 * space_.sigma * space_.sigma);

  // Separable kernel: per-axis factors over the active index window.
  std::vector<std::vector<double>> factors(dim);
  std::vector<std::size_t> first(dim), last(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    factors[d].resize(cells);
    first[d] = cells;
    last[d] = 0;
    for (std::size_t i = 0; i < cells; ++i) {
      const double delta = centers_[d][i] - y[static_cast<Eigen::Index>(d)];
      const double f = std::exp(-delta * delta * inv_two_var);
      factors[d][i] = f;
      if (f >= kKernelCutoff) {
        first[d] = std::min(first[d], i);
        last[d] = i;
      }
    }
    if (first[d] == cells) return;  // kernel negligible everywhere inside the bounds
  }

  if (dim == 1) {
    for (std::size_t i = first[0]; i <= last[0]; ++i) {
      values_[i] = std::max(values_[i], peak_ * factors[0][i]);
    }
  } else if (dim == 2) {
    for (std::size_t i = first[0]; i <= last[0]; ++i) {
      const double fi = peak_ * factors[0][i];
      double* row = values_.data() + i * cells;
      for (std::size_t j = first[1]; j <= last[1]; ++j) row[j] = std::max(row[j], fi * factors[1][j]);
    }
  } else {
    for (std::size_t i = first[0]; i <= last[0]; ++i) {
      const double fi = peak_ * factors[0][i];
      for (std::size_t j = first[1]; j <= last[1]; ++j) {
        const double fij = fi * factors[1][j];
        double* row = values_.data() + (i * cells + j) * cells;
        for (std::size_t k = first[2]; k <= last[2]; ++k) row[k] = std::max(row[k], fij * factors[2][k]);
      }
    }
  }
}

void OccupancyField::insert_scattered(const Vector& y) {
  const double inv_two_var = 1.0 / (2.0 * space_.sigma * space_.sigma);
  const double cutoff = -std::log(kKernelCutoff);
  for (std::size_t i = 0; i < halton_.size(); ++i) {
    const double e = (halton_[i] - y).squaredNorm() * inv_two_var;
    if (e <= cutoff) values_[i] = std::max(values_[i], peak_ * std::exp(-e));
  }
  absorbed_.push_back(y);
}

double OccupancyField::score() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  double volume = 1.0;
  for (const auto& b : space_.bounds) volume *= b.width();
  return sum * volume / static_cast<double>(values_.size());
}

std::size_t OccupancyField::cell_index(const Vector& point) const {
  const auto cells = space_.cells_per_dim;
  std::size_t index = 0;
  for (std::size_t d = 0; d < space_.dim(); ++d) {
    const auto& b = space_.bounds[d];
    const double rel = (point[static_cast<Eigen::Index>(d)] - b.low) / b.width();
    auto i = static_cast<std::size_t>(std::clamp(std::floor(rel * static_cast<double>(cells)), 0.0,
                                                 static_cast<double>(cells - 1)));
    index = index * cells + i;
  }
  return index;
}

double OccupancyField::max_kernel_at(const Vector& point) const {
  const double inv_two_var = 1.0 / (2.0 * space_.sigma * space_.sigma);
  double best = 0.0;
  for (const auto& y : absorbed_) best = std::max(best, peak_ * std::exp(-(point - y).squaredNorm() * inv_two_var));
  return best;
}

double OccupancyField::occupancy_at(const Vector& point) const {
  if (static_cast<std::size_t>(point.size()) != space_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from the objective space");
  }
  for (std::size_t d = 0; d < space_.dim(); ++d) {
    if (!space_.bounds[d].contains(point[static_cast<Eigen::Index>(d)])) {
      throw Error(ErrorCode::kOutOfBounds, "occupancy query outside the objective bounds");
    }
  }
  const double v = uses_lattice() ? values_[cell_index(point)] : max_kernel_at(point);
  return std::clamp(v / peak_, 0.0, 1.0);
}

double OccupancyField::occupancy_clamped(const Vector& point) const {
  Vector p = point;
  for (std::size_t d = 0; d < space_.dim(); ++d) {
    const auto& b = space_.bounds[d];
    p[static_cast<Eigen::Index>(d)] = std::clamp(p[static_cast<Eigen::Index>(d)], b.low, b.high);
  }
  return occupancy_at(p);
}

Vector OccupancyField::evaluation_point(std::size_t index) const {
  if (!uses_lattice()) return halton_.at(index);
  const auto dim = space_.dim();
  const auto cells = space_.cells_per_dim;
  Vector p(static_cast<Eigen::Index>(dim));
  for (std::size_t d = dim; d-- > 0;) {
    p[static_cast<Eigen::Index>(d)] = centers_[d][index % cells];
    index /= cells;
  }
  return p;
}

std::string OccupancyField::snapshot_csv() const {
  std::string text;
  for (std::size_t d = 0; d < space_.dim(); ++d) text += "c" + std::to_string(d) + ",";
  text += "value\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Vector p = evaluation_point(i);
    for (Eigen::Index d = 0; d < p.size(); ++d) text += format_number(p[d]) + ",";
    text += format_number(values_[i]) + "\n";
  }
  return text;
}

OccupancyField insert_states(OccupancyField field, std::span<const State> states) {
  field.insert(states);
  return field;
}

double coverage_score(const OccupancyField& field) { return field.score(); }

double occupancy_at(const OccupancyField& field, const Vector& point) { return field.occupancy_at(point); }

double coverage_score_of(const ObjectiveSpace& space, std::span<const State> states) {
  OccupancyField field(space);
  field.insert(states);
  return field.score();
}

}  // namespace explorer

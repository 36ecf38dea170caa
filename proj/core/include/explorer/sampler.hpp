#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "explorer/core.hpp"
#include "explorer/coverage.hpp"
#include "explorer/geometry.hpp"

namespace explorer {

using Rng = std::mt19937_64;

/// Independent, reproducible stream seed for a (seed, index) pair.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

enum class SamplerFallback { kBestOfAttempts, kError };

struct SamplerParams {
  std::size_t max_attempts = 1000;
  SamplerFallback fallback = SamplerFallback::kBestOfAttempts;
  /// Distance tolerance for the excluded-region test.
  double region_eps = 0.0;
};

/// Coverage-guided rejection sampling: uniform proposals in `box`, rejected
/// inside any excluded region, otherwise accepted with probability
/// 1 - occupancy. Occupancy is looked up with clamping, so a box reaching
/// past the field bounds is allowed.
Vector sample_target(const BoxBound& box, std::span<const ConvexRegion> excluded,
                     const OccupancyField& field, const SamplerParams& params, Rng& rng);

}  // namespace explorer

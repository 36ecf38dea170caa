#include "explorer/sampler.hpp"

#include <limits>
#include <optional>

#include "explorer/error.hpp"

namespace explorer {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser over the combined words.
  std::uint64_t z = seed ^ (index + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector sample_target(const BoxBound& box, std::span<const ConvexRegion> excluded,
                     const OccupancyField& field, const SamplerParams& params, Rng& rng) {
  if (box.dim() == 0 || box.degenerate()) {
    throw Error(ErrorCode::kInvalidRegion, "sampling box must have positive width in every dimension");
  }
  if (box.dim() != field.space().dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "sampling box and occupancy field differ in dimension");
  }
  if (params.max_attempts == 0) throw Error(ErrorCode::kConfig, "max_attempts must be at least 1");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(box.dim());

  std::optional<Vector> best_feasible;
  double best_feasible_occ = std::numeric_limits<double>::infinity();
  std::optional<Vector> best_any;
  double best_any_occ = std::numeric_limits<double>::infinity();

  for (std::size_t attempt = 0; attempt < params.max_attempts; ++attempt) {
    Vector p(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      const auto& a = box.axes[static_cast<std::size_t>(d)];
      p[d] = a.low + unit(rng) * a.width();
    }
    bool inside_region = false;
    for (const auto& region : excluded) {
      if (region.contains(p, params.region_eps)) {
        inside_region = true;
        break;
      }
    }
    const double occ = field.occupancy_clamped(p);
    if (occ < best_any_occ) {
      best_any_occ = occ;
      best_any = p;
    }
    if (inside_region) continue;
    if (occ < best_feasible_occ) {
      best_feasible_occ = occ;
      best_feasible = p;
    }
    if (unit(rng) < 1.0 - occ) return p;
  }

  if (params.fallback == SamplerFallback::kError || !best_any) {
    throw Error(ErrorCode::kSamplingExhausted,
                "no target accepted within " + std::to_string(params.max_attempts) + " attempts");
  }
  return best_feasible ? *best_feasible : *best_any;
}

}  // namespace explorer

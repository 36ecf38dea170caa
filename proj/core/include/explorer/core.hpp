#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace explorer {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Plant state x in R^n.
using State = Vector;
/// One control input u in R^w.
using ControlInput = Vector;
/// Input sequence u_0 .. u_{N-1}.
using InputVector = std::vector<ControlInput>;

enum class TraceOrigin { kRandom, kCoverageGuided };

std::string_view to_string(TraceOrigin origin);
TraceOrigin parse_trace_origin(std::string_view text);

/// One simulation run: N+1 states produced by N inputs at a fixed step.
struct DataTrace {
  std::vector<State> states;
  InputVector inputs;
  double dt = 1.0;
  std::uint64_t seed = 0;
  TraceOrigin origin = TraceOrigin::kRandom;

  std::size_t state_dim() const { return states.empty() ? 0 : states.front().size(); }
  std::size_t input_dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
  std::size_t steps() const { return inputs.size(); }

  /// Throws if states.size() != inputs.size() + 1, dt <= 0, dimensions are
  /// mixed or any entry is non-finite.
  void validate() const;
};

/// Linear interpolation of a trajectory at `points` equally spaced fractional
/// indices. Endpoints are copied exactly.
std::vector<State> resample_trajectory(std::span<const State> states, std::size_t points);
std::vector<State> resample_trajectory(const DataTrace& trace, std::size_t points);

/// Concatenates states in time order.
Vector flatten_trajectory(std::span<const State> states);
/// Inverse of flatten_trajectory for a known state dimension.
std::vector<State> unflatten_trajectory(const Vector& flat, std::size_t state_dim);

/// Default trajectory length used for trace distances and clustering.
inline constexpr std::size_t kDefaultResamplePoints = 50;

}  // namespace explorer

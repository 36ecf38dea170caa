#include "explorer/core.hpp"

#include <cmath>
#include <string>

#include "explorer/error.hpp"

namespace explorer {

std::string_view to_string(TraceOrigin origin) {
  return origin == TraceOrigin::kRandom ? "random" : "coverage-guided";
}

TraceOrigin parse_trace_origin(std::string_view text) {
  if (text == "random") return TraceOrigin::kRandom;
  if (text == "coverage-guided") return TraceOrigin::kCoverageGuided;
  throw Error(ErrorCode::kParse, "unknown trace origin '" + std::string(text) + "'");
}

void DataTrace::validate() const {
  if (states.size() != inputs.size() + 1) {
    throw Error(ErrorCode::kData, "trace has " + std::to_string(states.size()) +
                                      " states but " + std::to_string(inputs.size()) +
                                      " inputs");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kData, "trace dt must be positive and finite");
  }
  const auto n = state_dim();
  for (const auto& s : states) {
    if (static_cast<std::size_t>(s.size()) != n) {
      throw Error(ErrorCode::kDimensionMismatch, "trace mixes state dimensions");
    }
    if (!s.allFinite()) throw Error(ErrorCode::kData, "trace contains a non-finite state");
  }
  const auto w = input_dim();
  for (const auto& u : inputs) {
    if (static_cast<std::size_t>(u.size()) != w) {
      throw Error(ErrorCode::kDimensionMismatch, "trace mixes input dimensions");
    }
    if (!u.allFinite()) throw Error(ErrorCode::kData, "trace contains a non-finite input");
  }
}

std::vector<State> resample_trajectory(std::span<const State> states, std::size_t points) {
  if (states.size() < 2) {
    throw Error(ErrorCode::kDegenerateTrace, "cannot resample a trajectory with fewer than 2 states");
  }
  if (points < 2) {
    throw Error(ErrorCode::kDegenerateTrace, "resampling needs at least 2 points");
  }
  const auto last = states.size() - 1;
  std::vector<State> out;
  out.reserve(points);
  for (std::size_t j = 0; j < points; ++j) {
    if (j + 1 == points) {
      out.push_back(states[last]);
      break;
    }
    const double f = static_cast<double>(j) * static_cast<double>(last) /
                     static_cast<double>(points - 1);
    const auto i = static_cast<std::size_t>(std::floor(f));
    const double t = f - static_cast<double>(i);
    if (t == 0.0 || i >= last) {
      out.push_back(states[std::min(i, last)]);
    } else {
      out.push_back((1.0 - t) * states[i] + t * states[i + 1]);
    }
  }
  return out;
}

std::vector<State> resample_trajectory(const DataTrace& trace, std::size_t points) {
  return resample_trajectory(std::span<const State>(trace.states), points);
}

Vector flatten_trajectory(std::span<const State> states) {
  if (states.empty()) throw Error(ErrorCode::kEmptyData, "cannot flatten an empty trajectory");
  const auto n = states.front().size();
  Vector flat(n * static_cast<Eigen::Index>(states.size()));
  Eigen::Index offset = 0;
  for (const auto& s : states) {
    if (s.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "trajectory mixes state dimensions");
    }
    flat.segment(offset, n) = s;
    offset += n;
  }
  return flat;
}

std::vector<State> unflatten_trajectory(const Vector& flat, std::size_t state_dim) {
  const auto n = static_cast<Eigen::Index>(state_dim);
  if (n == 0 || flat.size() % n != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "flat length is not a multiple of the state dimension");
  }
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(flat.size() / n));
  for (Eigen::Index offset = 0; offset < flat.size(); offset += n) {
    out.emplace_back(flat.segment(offset, n));
  }
  return out;
}

}  // namespace explorer

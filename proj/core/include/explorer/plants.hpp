#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "explorer/core.hpp"
#include "explorer/coverage.hpp"
#include "explorer/error.hpp"

namespace explorer {

/// Static description of a system under test.
struct PlantSpec {
  std::string name;
  std::size_t n = 0;
  std::size_t w = 0;
  std::vector<Interval> input_bounds;
  double dt = 1.0;
  State x0;
  ObjectiveSpace objective;

  void validate() const;
};

/// Black-box discrete-time system x+ = f(x, u). Implementations are
/// immutable; step() is const and thread-compatible.
class Plant {
 public:
  virtual ~Plant() = default;

  const PlantSpec& spec() const { return spec_; }
  virtual State step(const State& x, const ControlInput& u) const = 0;

  /// Clips each input component into the declared bounds.
  ControlInput clamp_input(const ControlInput& u) const;

  /// Replaces the objective space. Meant for setup, before simulations run.
  void set_objective(ObjectiveSpace objective);

 protected:
  explicit Plant(PlantSpec spec);

  PlantSpec spec_;
};

/// Classical RK4 with u held constant over the step.
template <class Field>
State step_rk4(Field&& field, const State& x, const ControlInput& u, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kIntegration, "RK4 step needs dt > 0");
  const Vector k1 = field(x, u);
  const Vector k2 = field(State(x + 0.5 * dt * k1), u);
  const Vector k3 = field(State(x + 0.5 * dt * k2), u);
  const Vector k4 = field(State(x + dt * k3), u);
  if (!k1.allFinite() || !k2.allFinite() || !k3.allFinite() || !k4.allFinite()) {
    throw Error(ErrorCode::kIntegration, "non-finite derivative during RK4 step");
  }
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// x += v per axis.
State point_mass_step(const State& x, const ControlInput& v);

/// Point mass moving by its velocity input each step (dt = 1).
class PointMassPlant final : public Plant {
 public:
  /// Velocity bound per axis and objective half-width around the origin.
  explicit PointMassPlant(double max_speed = 1.0, double objective_half_width = 100.0);

  State step(const State& x, const ControlInput& u) const override;
};

inline constexpr double kCarMaxAccel = 9.81;
inline constexpr double kCarMaxSteer = 0.4;

/// (u1, u2, x1 cos x2, x1 sin x2); inputs outside the car's bounds are
/// clamped with a warning.
Vector kinematic_car_derivative(const State& x, const ControlInput& u);

/// Kinematic single-track car: state (v, phi, x, y), input (accel, steer rate).
class KinematicCarPlant final : public Plant {
 public:
  explicit KinematicCarPlant(double dt = 0.1);

  State step(const State& x, const ControlInput& u) const override;
};

}  // namespace explorer

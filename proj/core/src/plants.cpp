#include "explorer/plants.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace explorer {

void PlantSpec::validate() const {
  if (n == 0) throw Error(ErrorCode::kConfig, "plant state dimension must be positive");
  if (input_bounds.size() != w) throw Error(ErrorCode::kConfig, "plant input bounds must match the input dimension");
  for (const auto& b : input_bounds) {
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || !(b.low < b.high)) {
      throw Error(ErrorCode::kConfig, "plant input bounds need finite low < high");
    }
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::kConfig, "plant dt must be positive");
  if (static_cast<std::size_t>(x0.size()) != n || !x0.allFinite()) {
    throw Error(ErrorCode::kConfig, "plant initial state must be finite with dimension n");
  }
  objective.validate(n);
}

Plant::Plant(PlantSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

ControlInput Plant::clamp_input(const ControlInput& u) const {
  ControlInput out = u;
  for (std::size_t i = 0; i < spec_.w; ++i) {
    const auto& b = spec_.input_bounds[i];
    out[static_cast<Eigen::Index>(i)] = std::clamp(out[static_cast<Eigen::Index>(i)], b.low, b.high);
  }
  return out;
}

void Plant::set_objective(ObjectiveSpace objective) {
  objective.validate(spec_.n);
  spec_.objective = std::move(objective);
}

State point_mass_step(const State& x, const ControlInput& v) {
  if (x.size() != v.size()) throw Error(ErrorCode::kDimensionMismatch, "point mass state and velocity differ in size");
  return x + v;
}

namespace {

PlantSpec point_mass_spec(double max_speed, double half_width) {
  PlantSpec spec;
  spec.name = "point_mass";
  spec.n = 3;
  spec.w = 3;
  spec.input_bounds.assign(3, Interval{-max_speed, max_speed});
  spec.dt = 1.0;
  spec.x0 = State::Zero(3);
  spec.objective = ObjectiveSpace::make({0, 1, 2}, std::vector<Interval>(3, Interval{-half_width, half_width}));
  return spec;
}

PlantSpec car_spec(double dt) {
  PlantSpec spec;
  spec.name = "kinematic_car";
  spec.n = 4;
  spec.w = 2;
  spec.input_bounds = {{-kCarMaxAccel, kCarMaxAccel}, {-kCarMaxSteer, kCarMaxSteer}};
  spec.dt = dt;
  spec.x0 = (State(4) << 15.0, 0.0, 0.0, 0.0).finished();
  spec.objective = ObjectiveSpace::make({2, 3}, {{-100.0, 300.0}, {-200.0, 200.0}});
  return spec;
}

}  // namespace

PointMassPlant::PointMassPlant(double max_speed, double objective_half_width)
    : Plant(point_mass_spec(max_speed, objective_half_width)) {}

State PointMassPlant::step(const State& x, const ControlInput& u) const { return point_mass_step(x, u); }

Vector kinematic_car_derivative(const State& x, const ControlInput& u) {
  if (x.size() != 4 || u.size() != 2) throw Error(ErrorCode::kDimensionMismatch, "kinematic car expects x in R^4, u in R^2");
  double accel = u[0];
  double steer = u[1];
  if (std::abs(accel) > kCarMaxAccel || std::abs(steer) > kCarMaxSteer) {
    spdlog::warn("kinematic car: input ({}, {}) outside bounds, clamping", accel, steer);
    accel = std::clamp(accel, -kCarMaxAccel, kCarMaxAccel);
    steer = std::clamp(steer, -kCarMaxSteer, kCarMaxSteer);
  }
  Vector dx(4);
  dx << accel, steer, x[0] * std::cos(x[1]), x[0] * std::sin(x[1]);
  return dx;
}

KinematicCarPlant::KinematicCarPlant(double dt) : Plant(car_spec(dt)) {}

State KinematicCarPlant::step(const State& x, const ControlInput& u) const {
  return step_rk4(kinematic_car_derivative, x, u, spec_.dt);
}

}  // namespace explorer

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "explorer/core.hpp"
#include "explorer/coverage.hpp"
#include "explorer/koopman.hpp"
#include "explorer/plants.hpp"

namespace explorer {

struct MpcParams {
  std::size_t horizon = 15;
  /// Per-component input box; empty means "take it from the plant".
  std::vector<Interval> input_bounds;
  double effort_weight = 1e-4;
  std::size_t pgd_iterations = 100;
  std::size_t replan_every = 1;
  /// Stop once the projected state is this close to the target.
  double target_tolerance = 0.0;

  void validate(std::size_t input_dim) const;
};

/// Terminal-cost planner on a fixed lifted model:
///   J(U) = |M U + c(g0) - target|^2 + effort * |U|^2
/// with M's block i = P A^(H-1-i) B_in and c = P A^H g0, P selecting the
/// objective coordinates. Everything independent of g0 is built once.
class MpcPlanner {
 public:
  MpcPlanner(const KoopmanModel& model, std::vector<std::size_t> projection, MpcParams params);

  /// Box-constrained minimiser of J by projected gradient descent from U = 0.
  InputVector plan(const Vector& g0, const Vector& target) const;

  /// J and its gradient for stacked U (u_0 first).
  double objective(const Vector& g0, const Vector& target, const Vector& stacked) const;
  Vector gradient(const Vector& g0, const Vector& target, const Vector& stacked) const;

  /// Projected terminal state c(g0) + M U.
  Vector terminal(const Vector& g0, const Vector& stacked) const;

  const Matrix& operator_matrix() const { return M_; }
  const MpcParams& params() const { return params_; }
  std::size_t input_dim() const { return input_dim_; }

 private:
  Vector free_response(const Vector& g0) const;

  MpcParams params_;
  std::vector<std::size_t> projection_;
  std::size_t input_dim_ = 0;
  std::size_t lifted_dim_ = 0;
  Matrix PAH_;  // P A^H
  Matrix M_;
  Vector scale_;  // Jacobi scaling of the decision variables
  double step0_ = 1.0;
};

/// One-shot planning; builds a planner each call.
InputVector plan(const KoopmanModel& model, const Vector& g0, const Vector& target,
                 std::span<const std::size_t> projection, const MpcParams& params);

/// Stacks an input sequence into one vector and back.
Vector stack_inputs(std::span<const ControlInput> inputs);
InputVector unstack_inputs(const Vector& stacked, std::size_t input_dim);

/// Receding-horizon loop against the true plant: re-lift the true state,
/// plan, apply the leading input(s), repeat for `steps` steps or until the
/// projected state is within the tolerance of `target`.
DataTrace run_mpc_simulation(const Plant& plant, const KoopmanModel& model, const State& x0,
                             const Vector& target, std::size_t steps, const MpcParams& params);

}  // namespace explorer

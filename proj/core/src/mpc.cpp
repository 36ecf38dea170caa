#include "explorer/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "explorer/error.hpp"

namespace explorer {

void MpcParams::validate(std::size_t input_dim) const {
  if (horizon < 1) throw Error(ErrorCode::kConfig, "MPC horizon must be >= 1");
  if (!(effort_weight >= 0.0) || !std::isfinite(effort_weight)) {
    throw Error(ErrorCode::kConfig, "MPC effort weight must be finite and >= 0");
  }
  if (replan_every < 1) throw Error(ErrorCode::kConfig, "MPC replan_every must be >= 1");
  if (!(target_tolerance >= 0.0)) throw Error(ErrorCode::kConfig, "MPC target tolerance must be >= 0");
  if (input_bounds.size() != input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "MPC input bounds have " + std::to_string(input_bounds.size()) +
                                                   " components, model has " + std::to_string(input_dim));
  }
  for (const auto& b : input_bounds) {
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || b.low > b.high) {
      throw Error(ErrorCode::kConfig, "MPC input bounds must be finite with low <= high");
    }
  }
}

Vector stack_inputs(std::span<const ControlInput> inputs) {
  if (inputs.empty()) return Vector();
  const auto w = inputs.front().size();
  Vector out(static_cast<Eigen::Index>(inputs.size()) * w);
  for (std::size_t i = 0; i < inputs.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * w, w) = inputs[i];
  return out;
}

InputVector unstack_inputs(const Vector& stacked, std::size_t input_dim) {
  InputVector out;
  if (input_dim == 0) return out;
  const auto w = static_cast<Eigen::Index>(input_dim);
  for (Eigen::Index i = 0; i + w <= stacked.size(); i += w) out.emplace_back(stacked.segment(i, w));
  return out;
}

MpcPlanner::MpcPlanner(const KoopmanModel& model, std::vector<std::size_t> projection, MpcParams params)
    : params_(std::move(params)), projection_(std::move(projection)) {
  input_dim_ = model.input_dim();
  lifted_dim_ = model.lifted_dim();
  params_.validate(input_dim_);
  const auto m = static_cast<Eigen::Index>(lifted_dim_);
  if (model.A.rows() != m || model.A.cols() != m || model.B_in.rows() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "model matrices do not match the lifted dimension");
  }
  if (projection_.empty()) throw Error(ErrorCode::kProjection, "MPC needs a non-empty projection");
  const auto p = static_cast<Eigen::Index>(projection_.size());
  Matrix P = Matrix::Zero(p, m);
  for (Eigen::Index r = 0; r < p; ++r) {
    const auto c = projection_[static_cast<std::size_t>(r)];
    if (c >= model.state_dim()) throw Error(ErrorCode::kProjection, "projection index beyond the state dimension");
    P(r, static_cast<Eigen::Index>(c)) = 1.0;
  }

  const auto H = static_cast<Eigen::Index>(params_.horizon);
  const auto w = static_cast<Eigen::Index>(input_dim_);
  M_.resize(p, H * w);
  Matrix PA = P;  // P A^j
  for (Eigen::Index j = 0; j < H; ++j) {
    // Input u_i reaches the terminal state through A^(H-1-i).
    M_.middleCols((H - 1 - j) * w, w) = PA * model.B_in;
    PA = (PA * model.A).eval();
  }
  PAH_ = std::move(PA);
  if (!M_.allFinite() || !PAH_.allFinite()) throw Error(ErrorCode::kNumerical, "MPC operator is not finite");

  // Jacobi scaling: U = D V with D = diag(M^T M + effort)^(-1/2). The box
  // stays a box under D, so projection is unchanged.
  const Eigen::Index nvar = H * w;
  scale_.resize(nvar);
  for (Eigen::Index i = 0; i < nvar; ++i) {
    const double d = M_.col(i).squaredNorm() + params_.effort_weight;
    scale_[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }

  // Largest eigenvalue of the scaled Hessian / 2 by power iteration.
  const Matrix MD = M_ * scale_.asDiagonal();
  const Vector effort_diag = params_.effort_weight * scale_.array().square().matrix();
  Vector v = Vector::Ones(nvar).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 20; ++it) {
    Vector hv = MD.transpose() * (MD * v) + effort_diag.cwiseProduct(v);
    lambda = v.dot(hv);
    const double norm = hv.norm();
    if (!(norm > 0.0)) break;
    v = hv / norm;
  }
  step0_ = lambda > 0.0 ? 1.0 / lambda : 1.0;
}

Vector MpcPlanner::free_response(const Vector& g0) const {
  if (static_cast<std::size_t>(g0.size()) != lifted_dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "lifted start has dimension " + std::to_string(g0.size()) +
                                                   ", model expects " + std::to_string(lifted_dim_));
  }
  return PAH_ * g0;
}

Vector MpcPlanner::terminal(const Vector& g0, const Vector& stacked) const {
  return free_response(g0) + M_ * stacked;
}

double MpcPlanner::objective(const Vector& g0, const Vector& target, const Vector& stacked) const {
  return (terminal(g0, stacked) - target).squaredNorm() + params_.effort_weight * stacked.squaredNorm();
}

Vector MpcPlanner::gradient(const Vector& g0, const Vector& target, const Vector& stacked) const {
  return 2.0 * (M_.transpose() * (terminal(g0, stacked) - target)) + 2.0 * params_.effort_weight * stacked;
}

InputVector MpcPlanner::plan(const Vector& g0, const Vector& target) const {
  if (static_cast<std::size_t>(target.size()) != projection_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "target dimension does not match the objective projection");
  }
  const Vector c = free_response(g0) - target;
  const Eigen::Index nvar = M_.cols();
  const auto w = static_cast<Eigen::Index>(input_dim_);

  // Work in V = D^-1 U; bounds scale per component.
  Vector lo(nvar), hi(nvar);
  for (Eigen::Index i = 0; i < nvar; ++i) {
    const auto& b = params_.input_bounds[static_cast<std::size_t>(i % w)];
    lo[i] = b.low / scale_[i];
    hi[i] = b.high / scale_[i];
  }
  const Matrix MD = M_ * scale_.asDiagonal();
  const Vector eff = params_.effort_weight * scale_.array().square().matrix();
  const auto cost = [&](const Vector& v) {
    return (MD * v + c).squaredNorm() + eff.dot(v.cwiseProduct(v));
  };

  Vector v = Vector::Zero(nvar).cwiseMax(lo).cwiseMin(hi);
  double f = cost(v);
  double step = step0_;
  for (std::size_t it = 0; it < params_.pgd_iterations; ++it) {
    const Vector g = 2.0 * (MD.transpose() * (MD * v + c)) + 2.0 * eff.cwiseProduct(v);
    bool moved = false;
    double t = step;
    for (int bt = 0; bt < 60; ++bt) {
      const Vector cand = (v - t * g).cwiseMax(lo).cwiseMin(hi);
      const Vector d = cand - v;
      const double fc = cost(cand);
      if (fc <= f + g.dot(d) + d.squaredNorm() / (2.0 * t)) {
        moved = d.squaredNorm() > 0.0;
        v = cand;
        f = fc;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  const Vector u = scale_.cwiseProduct(v);
  InputVector out = unstack_inputs(u, input_dim_);
  for (auto& ui : out) {
    for (Eigen::Index j = 0; j < w; ++j) {
      const auto& b = params_.input_bounds[static_cast<std::size_t>(j)];
      ui[j] = std::clamp(ui[j], b.low, b.high);
    }
  }
  return out;
}

InputVector plan(const KoopmanModel& model, const Vector& g0, const Vector& target,
                 std::span<const std::size_t> projection, const MpcParams& params) {
  const MpcPlanner planner(model, {projection.begin(), projection.end()}, params);
  return planner.plan(g0, target);
}

DataTrace run_mpc_simulation(const Plant& plant, const KoopmanModel& model, const State& x0,
                             const Vector& target, std::size_t steps, const MpcParams& params) {
  const auto& spec = plant.spec();
  if (model.state_dim() != spec.n || model.input_dim() != spec.w) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model (n=" + std::to_string(model.state_dim()) + ", w=" + std::to_string(model.input_dim()) +
                    ") does not match plant " + spec.name + " (n=" + std::to_string(spec.n) +
                    ", w=" + std::to_string(spec.w) + ")");
  }
  if (static_cast<std::size_t>(x0.size()) != spec.n) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state has the wrong dimension");
  }
  MpcParams p = params;
  if (p.input_bounds.empty()) p.input_bounds = spec.input_bounds;
  const MpcPlanner planner(model, spec.objective.projection, p);

  DataTrace trace;
  trace.dt = spec.dt;
  trace.origin = TraceOrigin::kCoverageGuided;
  trace.states.push_back(x0);
  InputVector planned;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const State& x = trace.states.back();
    if ((project(spec.objective, x) - target).norm() <= p.target_tolerance) break;
    if (k % p.replan_every == 0 || cursor >= planned.size()) {
      planned = planner.plan(model.map.lift(x), target);
      cursor = 0;
    }
    const ControlInput u = plant.clamp_input(planned[cursor++]);
    try {
      trace.states.push_back(plant.step(x, u));
    } catch (const Error& e) {
      throw Error(e.code(), "MPC step " + std::to_string(k) + ": " + e.what());
    }
    trace.inputs.push_back(u);
  }
  return trace;
}

}  // namespace explorer

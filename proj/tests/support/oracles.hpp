#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "explorer/core.hpp"
#include "explorer/plants.hpp"

namespace explorer::testing {

/// Phase-1 simplex (Bland's rule) on  V lambda = p, 1^T lambda = 1,
/// lambda >= 0. True when the artificial objective reaches <= tol.
bool lp_in_hull(const Matrix& V, const Vector& p, double tol = 1e-9);

/// Largest achievable min pairwise distance over all `count`-subsets.
double exhaustive_maxmin(const Matrix& distances, std::size_t count);

/// Minimum within-cluster sum of squares over every 2-partition of the rows.
/// Returns the labels of the best partition (row 0 always labelled 0).
std::vector<int> best_two_partition(const Matrix& rows);

/// Standard normal CDF from erfc.
double normal_cdf(double x);

/// Central finite-difference gradient.
Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// x+ = A x + B u with the given objective projection and input box.
class LinearPlant final : public Plant {
 public:
  LinearPlant(Matrix A, Matrix B, std::vector<Interval> input_bounds, std::vector<std::size_t> projection,
              std::vector<Interval> objective_bounds, State x0);

  State step(const State& x, const ControlInput& u) const override;

 private:
  Matrix A_;
  Matrix B_;
};

/// Traces of a linear system from random starts and inputs.
std::vector<DataTrace> linear_traces(const Matrix& A, const Matrix& B, std::size_t count, std::size_t steps,
                                     std::uint64_t seed);

}  // namespace explorer::testing

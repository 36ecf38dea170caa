#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "explorer/core.hpp"

namespace explorer {

/// Identity observables followed by m_rff random Fourier features
/// sqrt(2/m_rff) * cos(W x + b), W ~ N(0, 1/lengthscale^2), b ~ U[0, 2pi).
class ObservableMap {
 public:
  ObservableMap() = default;
  ObservableMap(std::size_t state_dim, std::size_t m_rff, double lengthscale, std::uint64_t seed);
  /// Explicit feature parameters (frequencies: m_rff x n).
  ObservableMap(Matrix frequencies, Vector phases, double lengthscale, std::uint64_t seed);

  std::size_t state_dim() const { return state_dim_; }
  std::size_t feature_count() const { return static_cast<std::size_t>(phases_.size()); }
  std::size_t lifted_dim() const { return state_dim_ + feature_count(); }
  double lengthscale() const { return lengthscale_; }
  std::uint64_t seed() const { return seed_; }
  const Matrix& frequencies() const { return frequencies_; }
  const Vector& phases() const { return phases_; }

  Vector lift(const State& x) const;

 private:
  std::size_t state_dim_ = 0;
  Matrix frequencies_;
  Vector phases_;
  double lengthscale_ = 1.0;
  std::uint64_t seed_ = 0;
};

Vector lift(const ObservableMap& map, const State& x);

/// Lifted linear dynamics g(x+) = A g(x) + B_in u.
struct KoopmanModel {
  Matrix A;
  Matrix B_in;
  ObservableMap map;
  double reg = 0.0;
  double val_rmse = 0.0;

  std::size_t state_dim() const { return map.state_dim(); }
  std::size_t input_dim() const { return static_cast<std::size_t>(B_in.cols()); }
  std::size_t lifted_dim() const { return map.lifted_dim(); }
};

/// Ridge-regularised EDMD over all consecutive snapshot pairs of `traces`.
KoopmanModel fit_edmd(std::span<const DataTrace> traces, const ObservableMap& map, double reg);

/// Pure linear rollout from lift(x0); returns inputs.size() + 1 states read
/// off the identity block.
std::vector<State> predict(const KoopmanModel& model, const State& x0, std::span<const ControlInput> inputs);

/// Root-mean-square error of `horizon`-step open-loop predictions over
/// consecutive non-overlapping windows of each trace.
double open_loop_rmse(const KoopmanModel& model, std::span<const DataTrace> traces, std::size_t horizon);

struct TuneGrid {
  std::vector<std::size_t> m_rff{0, 40, 100, 200};
  /// Multiples of the mean per-dimension std of the training states.
  std::vector<double> lengthscale_factors{0.5, 1.0, 2.0, 5.0};
  std::vector<double> regs{1e-6, 1e-3, 1e-1};
  std::size_t validation_horizon = 10;
};

struct TuneCandidate {
  std::size_t m_rff = 0;
  double lengthscale = 0.0;
  double reg = 0.0;
  double val_rmse = 0.0;
};

struct TuneResult {
  KoopmanModel model;
  std::vector<TuneCandidate> candidates;
};

/// Validation errors within this relative band of the best count as ties.
inline constexpr double kTuneTieTolerance = 1e-6;

/// Grid search: 75/25 seeded split by trace, fit on the training part, score
/// open-loop RMSE on validation, keep the best (ties: smaller m_rff, then
/// larger reg). The returned model is the winning fit on the training part.
TuneResult tune_with_report(std::span<const DataTrace> traces, const TuneGrid& grid, std::uint64_t seed);
KoopmanModel tune(std::span<const DataTrace> traces, const TuneGrid& grid, std::uint64_t seed);

/// `<stem>.json` manifest plus `<stem>_A.csv` and `<stem>_B.csv`.
void save_model(const KoopmanModel& model, const std::filesystem::path& json_path);
KoopmanModel load_model(const std::filesystem::path& json_path);

}  // namespace explorer

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "explorer/coverage.hpp"
#include "explorer/geometry.hpp"
#include "explorer/koopman.hpp"
#include "explorer/mpc.hpp"
#include "explorer/plants.hpp"
#include "explorer/refine.hpp"
#include "explorer/sampler.hpp"

namespace explorer {

/// `count` traces of `steps` steps from the plant's initial state, inputs
/// i.i.d. uniform over the input box. Each trace draws its own seed from
/// `rng`.
std::vector<DataTrace> generate_random_traces(const Plant& plant, std::size_t count, std::size_t steps, Rng& rng);

/// Where training-phase targets may be drawn.
enum class BoundMode {
  kFixedBox,    // uniform over the training-data box, no occupancy test
  kSingleHull,  // box minus one hull around all refined data
  kMultiHull,   // box minus one hull per cluster
};
std::string_view to_string(BoundMode mode);
BoundMode parse_bound_mode(std::string_view text);

struct TrainParams {
  std::size_t iterations = 4;
  std::size_t sim_count = 20;
  std::size_t initial_clusters = 5;
  double selection_rate = 0.5;
  std::size_t steps = 100;
  std::size_t resample_points = kDefaultResamplePoints;
  double box_margin = kDefaultBoxMargin;
  BoundMode bound_mode = BoundMode::kMultiHull;
  SamplerParams sampler;
  MpcParams mpc;
  TuneGrid grid;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t cluster_count = 0;
  std::size_t pool_size = 0;
  std::size_t refined_size = 0;
  /// Coverage of the refined training set on its own.
  double refined_score = 0.0;
  double val_rmse = 0.0;
  std::size_t m_rff = 0;
  double lengthscale = 0.0;
  double reg = 0.0;
  /// Clusters as indices into the refined set.
  std::vector<Cluster> clusters;
  BoxBound box;
  std::vector<ConvexRegion> regions;
  std::vector<Vector> targets;
  /// Occupancy-field score after this iteration's simulations.
  double field_score = 0.0;
};

struct TrainResult {
  KoopmanModel model;
  std::vector<DataTrace> refined;
  std::vector<Cluster> clusters;
  /// Absorbs the states of every coverage-guided training simulation.
  OccupancyField field;
  std::vector<IterationRecord> iterations;
  /// Every trace simulated during training (random and coverage-guided).
  std::vector<DataTrace> simulated;
};

/// Iterative coverage-guided model training.
TrainResult train_model(const Plant& plant, const TrainParams& params);

struct TestParams {
  std::size_t count = 50;
  std::size_t steps = 100;
  SamplerParams sampler;
  MpcParams mpc;
  std::uint64_t seed = 0;
};

struct TestCase {
  Vector target;
  InputVector inputs;
  DataTrace trace;
};

struct TestSuite {
  std::vector<TestCase> cases;
  /// Coverage of the suite's own states after each case.
  std::vector<double> incremental_scores;
  double final_score = 0.0;
};

/// Targets are drawn over the objective bounds against `field` (no hull
/// exclusion), each steered to by MPC; `field` absorbs every case. Scores
/// count the suite's states only.
TestSuite generate_test_cases(const Plant& plant, const KoopmanModel& model, OccupancyField& field,
                              const TestParams& params);

/// Coverage score of the pooled states of `traces` over `space`.
double suite_score(const ObjectiveSpace& space, std::span<const DataTrace> traces);

struct CompareParams {
  TrainParams train;
  std::size_t test_count = 50;
  std::size_t steps = 100;
  std::vector<std::uint64_t> seeds{0};
};

struct MethodSummary {
  std::string method;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t plant_steps = 0;  // per seed
};

struct SeedScore {
  std::uint64_t seed = 0;
  std::string method;
  double score = 0.0;
};

struct ComparisonReport {
  std::vector<MethodSummary> methods;
  std::vector<SeedScore> per_seed;
};

/// Coverage-guided suite (after training) against random-input traces with
/// the same case count and trace length, per seed. Throws if the step
/// budgets differ.
ComparisonReport compare_methods(const Plant& plant, const CompareParams& params);

/// Sample mean and standard deviation (0 for fewer than two values).
std::pair<double, double> mean_std(std::span<const double> values);

}  // namespace explorer

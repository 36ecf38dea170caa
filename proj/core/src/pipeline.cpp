#include "explorer/pipeline.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "explorer/error.hpp"

namespace explorer {

std::vector<DataTrace> generate_random_traces(const Plant& plant, std::size_t count, std::size_t steps, Rng& rng) {
  if (count < 1) throw Error(ErrorCode::kConfig, "random trace count must be at least 1");
  const auto& spec = plant.spec();
  std::vector<DataTrace> traces;
  traces.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    DataTrace t;
    t.seed = rng();
    t.dt = spec.dt;
    t.origin = TraceOrigin::kRandom;
    Rng local(t.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    t.states.push_back(spec.x0);
    for (std::size_t k = 0; k < steps; ++k) {
      ControlInput u(static_cast<Eigen::Index>(spec.w));
      for (std::size_t j = 0; j < spec.w; ++j) {
        const auto& b = spec.input_bounds[j];
        u[static_cast<Eigen::Index>(j)] = b.low + unit(local) * b.width();
      }
      t.states.push_back(plant.step(t.states.back(), u));
      t.inputs.push_back(std::move(u));
    }
    traces.push_back(std::move(t));
  }
  return traces;
}

std::string_view to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::kFixedBox: return "fixed_box";
    case BoundMode::kSingleHull: return "single_hull";
    case BoundMode::kMultiHull: return "multi_hull";
  }
  return "?";
}

BoundMode parse_bound_mode(std::string_view text) {
  if (text == "fixed_box") return BoundMode::kFixedBox;
  if (text == "single_hull") return BoundMode::kSingleHull;
  if (text == "multi_hull") return BoundMode::kMultiHull;
  throw Error(ErrorCode::kConfig, "unknown bound mode '" + std::string(text) + "'");
}

void TrainParams::validate() const {
  if (iterations < 1) throw Error(ErrorCode::kConfig, "training iterations must be >= 1");
  if (initial_clusters < 1) throw Error(ErrorCode::kConfig, "cluster count must be >= 1");
  if (sim_count < initial_clusters) throw Error(ErrorCode::kConfig, "sim_count must be >= the cluster count");
  if (!(selection_rate > 0.0 && selection_rate <= 1.0)) {
    throw Error(ErrorCode::kConfig, "selection rate must lie in (0, 1]");
  }
  if (steps < 1) throw Error(ErrorCode::kConfig, "trace length must be >= 1 step");
  if (!(box_margin >= 0.0)) throw Error(ErrorCode::kConfig, "box margin must be >= 0");
}

namespace {

std::vector<Vector> projected_states(const ObjectiveSpace& space, std::span<const DataTrace> traces,
                                     std::span<const std::size_t> subset) {
  std::vector<Vector> out;
  for (const auto i : subset) {
    for (const auto& s : traces[i].states) out.push_back(project(space, s));
  }
  return out;
}

Vector uniform_in_box(const BoxBound& box, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector p(static_cast<Eigen::Index>(box.dim()));
  for (std::size_t d = 0; d < box.dim(); ++d) {
    p[static_cast<Eigen::Index>(d)] = box.axes[d].low + unit(rng) * box.axes[d].width();
  }
  return p;
}

MpcParams with_plant_bounds(MpcParams p, const Plant& plant) {
  if (p.input_bounds.empty()) p.input_bounds = plant.spec().input_bounds;
  return p;
}

}  // namespace

double suite_score(const ObjectiveSpace& space, std::span<const DataTrace> traces) {
  OccupancyField field(space);
  for (const auto& t : traces) field.insert(t.states);
  return field.score();
}

TrainResult train_model(const Plant& plant, const TrainParams& params) {
  params.validate();
  const auto& spec = plant.spec();
  const auto& space = spec.objective;
  const MpcParams mpc = with_plant_bounds(params.mpc, plant);

  Rng rng(stream_seed(params.seed, 0));
  std::vector<DataTrace> new_traces = generate_random_traces(plant, params.sim_count, params.steps, rng);
  std::vector<DataTrace> simulated = new_traces;
  std::vector<DataTrace> selected;
  OccupancyField field(space);
  std::vector<IterationRecord> records;
  KoopmanModel model;
  std::vector<Cluster> clusters;

  for (std::size_t it = 0; it < params.iterations; ++it) {
    try {
      IterationRecord rec;
      rec.iteration = it;
      rec.cluster_count = params.initial_clusters + it;

      std::vector<DataTrace> pool = std::move(selected);
      for (auto& t : new_traces) pool.push_back(std::move(t));
      new_traces.clear();
      rec.pool_size = pool.size();

      RefineParams rp;
      rp.k = rec.cluster_count;
      rp.rate = params.selection_rate;
      rp.resample_points = params.resample_points;
      rp.seed = stream_seed(params.seed, 1000 + it);
      const RefineResult refined = refine_training_data(pool, rp);

      selected.clear();
      for (const auto i : refined.selected) selected.push_back(pool[i]);
      // Re-index clusters into the refined set.
      std::vector<std::size_t> position(pool.size(), 0);
      for (std::size_t j = 0; j < refined.selected.size(); ++j) position[refined.selected[j]] = j;
      clusters.clear();
      for (const auto& c : refined.selected_by_cluster) {
        Cluster mapped;
        for (const auto i : c) mapped.push_back(position[i]);
        clusters.push_back(std::move(mapped));
      }
      rec.clusters = clusters;
      rec.refined_size = selected.size();
      rec.refined_score = suite_score(space, selected);

      TuneResult tuned = tune_with_report(selected, params.grid, stream_seed(params.seed, 2000 + it));
      model = std::move(tuned.model);
      rec.val_rmse = model.val_rmse;
      rec.m_rff = model.map.feature_count();
      rec.lengthscale = model.map.lengthscale();
      rec.reg = model.reg;

      std::vector<std::size_t> all(selected.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      const auto points = projected_states(space, selected, all);
      rec.box = box_bound(points, params.box_margin).intersect(space.bounds);
      if (params.bound_mode == BoundMode::kMultiHull) {
        std::vector<std::vector<Vector>> groups;
        for (const auto& c : clusters) groups.push_back(projected_states(space, selected, c));
        rec.regions = build_regions(groups);
      } else if (params.bound_mode == BoundMode::kSingleHull) {
        const std::vector<std::vector<Vector>> groups{points};
        rec.regions = build_regions(groups);
      }

      Rng sample_rng(stream_seed(params.seed, 3000 + it));
      if (rec.box.degenerate()) {
        throw Error(ErrorCode::kInvalidRegion, "training data box is degenerate in the objective space");
      }
      for (std::size_t s = 0; s < params.sim_count; ++s) {
        const Vector target = params.bound_mode == BoundMode::kFixedBox
                                  ? uniform_in_box(rec.box, sample_rng)
                                  : sample_target(rec.box, rec.regions, field, params.sampler, sample_rng);
        DataTrace t = run_mpc_simulation(plant, model, spec.x0, target, params.steps, mpc);
        t.seed = stream_seed(params.seed, 3000 + it);
        field.insert(t.states);
        rec.targets.push_back(target);
        simulated.push_back(t);
        new_traces.push_back(std::move(t));
      }
      rec.field_score = field.score();
      spdlog::debug("iteration {}: refined {} of {}, score {}, val rmse {}", it, rec.refined_size,
                    rec.pool_size, rec.refined_score, rec.val_rmse);
      records.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error(e.code(), "training iteration " + std::to_string(it) + ": " + e.what());
    }
  }
  return TrainResult{std::move(model), std::move(selected), std::move(clusters), std::move(field),
                     std::move(records), std::move(simulated)};
}

TestSuite generate_test_cases(const Plant& plant, const KoopmanModel& model, OccupancyField& field,
                              const TestParams& params) {
  const auto& spec = plant.spec();
  const MpcParams mpc = with_plant_bounds(params.mpc, plant);
  const BoxBound box{spec.objective.bounds};
  Rng rng(stream_seed(params.seed, 4000));
  TestSuite suite;
  OccupancyField own(spec.objective);
  for (std::size_t i = 0; i < params.count; ++i) {
    try {
      TestCase tc;
      tc.target = sample_target(box, {}, field, params.sampler, rng);
      tc.trace = run_mpc_simulation(plant, model, spec.x0, tc.target, params.steps, mpc);
      tc.trace.seed = params.seed;
      tc.inputs = tc.trace.inputs;
      field.insert(tc.trace.states);
      own.insert(tc.trace.states);
      suite.incremental_scores.push_back(own.score());
      suite.cases.push_back(std::move(tc));
    } catch (const Error& e) {
      throw Error(e.code(), "test case " + std::to_string(i) + ": " + e.what());
    }
  }
  suite.final_score = own.score();
  return suite;
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

ComparisonReport compare_methods(const Plant& plant, const CompareParams& params) {
  if (params.seeds.empty()) throw Error(ErrorCode::kConfig, "comparison needs at least one seed");
  if (params.test_count < 1) throw Error(ErrorCode::kConfig, "comparison needs at least one test case");
  ComparisonReport report;
  std::vector<double> guided_scores;
  std::vector<double> random_scores;
  std::size_t guided_steps = 0;
  std::size_t random_steps = 0;
  for (const auto seed : params.seeds) {
    TrainParams tp = params.train;
    tp.seed = seed;
    TrainResult trained = train_model(plant, tp);

    TestParams test;
    test.count = params.test_count;
    test.steps = params.steps;
    test.sampler = tp.sampler;
    test.mpc = tp.mpc;
    test.seed = seed;
    const TestSuite suite = generate_test_cases(plant, trained.model, trained.field, test);

    Rng rng(stream_seed(seed, 5000));
    const auto random = generate_random_traces(plant, params.test_count, params.steps, rng);

    std::size_t g = 0;
    for (const auto& c : suite.cases) g += c.trace.steps();
    std::size_t r = 0;
    for (const auto& t : random) r += t.steps();
    if (g != r) {
      throw Error(ErrorCode::kData, "step budgets differ for seed " + std::to_string(seed) + ": coverage-guided " +
                                        std::to_string(g) + " vs random " + std::to_string(r));
    }
    guided_steps = g;
    random_steps = r;

    const double rs = suite_score(plant.spec().objective, random);
    guided_scores.push_back(suite.final_score);
    random_scores.push_back(rs);
    report.per_seed.push_back({seed, "coverage_guided", suite.final_score});
    report.per_seed.push_back({seed, "random", rs});
  }
  const auto [gm, gs] = mean_std(guided_scores);
  const auto [rm, rsd] = mean_std(random_scores);
  report.methods.push_back({"coverage_guided", gm, gs, guided_steps});
  report.methods.push_back({"random", rm, rsd, random_steps});
  return report;
}

}  // namespace explorer

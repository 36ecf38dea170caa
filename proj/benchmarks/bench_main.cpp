#include <random>

#include <benchmark/benchmark.h>

#include "explorer/coverage.hpp"
#include "explorer/geometry.hpp"
#include "explorer/koopman.hpp"
#include "explorer/mpc.hpp"
#include "explorer/pipeline.hpp"

using namespace explorer;

namespace {

std::vector<State> random_states(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<State> out;
  for (std::size_t i = 0; i < count; ++i) {
    State s(static_cast<Eigen::Index>(dim));
    for (auto& v : s) v = u(rng);
    out.push_back(s);
  }
  return out;
}

ObjectiveSpace cube(std::size_t dim) {
  std::vector<std::size_t> proj;
  for (std::size_t i = 0; i < dim; ++i) proj.push_back(i);
  return ObjectiveSpace::make(proj, std::vector<Interval>(dim, {0.0, 100.0}));
}

void BM_CoverageInsert(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto states = random_states(100, dim, 1);
  for (auto _ : state) {
    OccupancyField f(cube(dim));
    f.insert(states);
    benchmark::DoNotOptimize(f.score());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_CoverageInsert)->Arg(1)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_HullContainment(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto pts = random_states(200, dim, 2);
  const ConvexRegion region(std::vector<Vector>(pts.begin(), pts.end()));
  const auto queries = random_states(64, dim, 3);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(region.contains(q, 1e-6));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_HullContainment)->Arg(2)->Arg(3)->Arg(5);

KoopmanModel car_model(std::size_t features) {
  const KinematicCarPlant car;
  Rng rng(4);
  const auto traces = generate_random_traces(car, 20, 100, rng);
  return fit_edmd(traces, ObservableMap(4, features, 50.0, 1), 1e-3);
}

void BM_MpcPlan(benchmark::State& state) {
  const auto model = car_model(static_cast<std::size_t>(state.range(0)));
  MpcParams p;
  p.input_bounds = KinematicCarPlant().spec().input_bounds;
  const MpcPlanner planner(model, {2, 3}, p);
  const Vector g0 = model.map.lift((State(4) << 15, 0, 0, 0).finished());
  const Vector target = (Vector(2) << 80, 30).finished();
  for (auto _ : state) benchmark::DoNotOptimize(planner.plan(g0, target));
}
BENCHMARK(BM_MpcPlan)->Arg(0)->Arg(100)->Arg(200);

void BM_EdmdFit(benchmark::State& state) {
  const KinematicCarPlant car;
  Rng rng(5);
  const auto traces = generate_random_traces(car, 20, 100, rng);
  const ObservableMap map(4, static_cast<std::size_t>(state.range(0)), 50.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_edmd(traces, map, 1e-3));
}
BENCHMARK(BM_EdmdFit)->Arg(0)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "explorer/acas.hpp"
#include "explorer/cli/commands.hpp"
#include "explorer/coverage.hpp"
#include "explorer/geometry.hpp"
#include "explorer/io.hpp"
#include "explorer/koopman.hpp"
#include "explorer/mpc.hpp"
#include "explorer/pipeline.hpp"
#include "explorer/refine.hpp"
#include "oracles.hpp"

using namespace explorer;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::vector<State> scalars(std::initializer_list<double> values) {
  std::vector<State> out;
  for (double v : values) out.push_back((State(1) << v).finished());
  return out;
}

// 1 -------------------------------------------------------------------------
Outcome two_states() {
  const auto space = ObjectiveSpace::make({0}, {{0.0, 100.0}}, 3.0, 256);
  const double two = coverage_score_of(space, scalars({20, 60}));
  const double three = coverage_score_of(space, scalars({20, 25, 60}));
  const double closed = 3.0 - 2.0 * testing::normal_cdf(-5.0 / 6.0);
  const bool pass = std::abs(two - 2.0) <= 0.02 && std::abs(three - 2.595) <= 0.01 && std::abs(closed - 2.595) <= 0.01;
  return {pass, "{20,60} -> " + fmt(two, 8) + ", {20,25,60} -> " + fmt(three, 8) + " (closed form " + fmt(closed, 8) +
                    ")"};
}

// 2 -------------------------------------------------------------------------
Outcome coverage_properties() {
  std::mt19937_64 rng(2024);
  const auto car = ObjectiveSpace::make({0, 1}, {{-100.0, 300.0}, {-200.0, 200.0}});
  std::uniform_real_distribution<double> ux(-100.0, 300.0), uy(-200.0, 200.0);
  OccupancyField field(car);
  double prev = field.score();
  double worst_drop = 0.0;
  std::vector<State> inserted;
  for (int i = 0; i < 1000; ++i) {
    const State s = (State(2) << ux(rng), uy(rng)).finished();
    inserted.push_back(s);
    field.insert(std::vector<State>{s});
    const double now = field.score();
    worst_drop = std::max(worst_drop, prev - now);
    prev = now;
  }
  const bool monotone = worst_drop <= 1e-9;

  const double before = field.score();
  field.insert(inserted);
  const double dup_delta = std::abs(field.score() - before);
  const bool idempotent = dup_delta < 1e-12;

  // Score gain of a second state shrinks as it approaches the first.
  const auto line = ObjectiveSpace::make({0}, {{0.0, 100.0}}, 3.0, 256);
  const double base = coverage_score_of(line, scalars({50}));
  double last_gain = std::numeric_limits<double>::infinity();
  bool trend = true;
  for (double d : {30.0, 20.0, 10.0, 6.0, 3.0, 1.5, 0.5, 0.0}) {
    const double gain = coverage_score_of(line, scalars({50, 50 + d})) - base;
    trend = trend && gain <= last_gain + 1e-12;
    last_gain = gain;
  }
  trend = trend && last_gain < 1e-12;

  // Doubling the lattice resolution.
  double worst_rel = 0.0;
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<std::size_t> proj;
    std::vector<Interval> bounds;
    for (std::size_t k = 0; k < d; ++k) {
      proj.push_back(k);
      bounds.push_back({0.0, 100.0});
    }
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<State> states;
    for (int i = 0; i < 60; ++i) {
      State s(static_cast<Eigen::Index>(d));
      for (auto& v : s) v = u(rng);
      states.push_back(s);
    }
    const std::size_t cells = default_cells_per_dim(d);
    const double coarse = coverage_score_of(ObjectiveSpace::make(proj, bounds, 3.0, cells), states);
    const double fine = coverage_score_of(ObjectiveSpace::make(proj, bounds, 3.0, 2 * cells), states);
    worst_rel = std::max(worst_rel, std::abs(fine - coarse) / coarse);
  }
  const bool stable = worst_rel < 0.005;
  return {monotone && idempotent && trend && stable,
          "max drop " + fmt(worst_drop) + ", duplicate delta " + fmt(dup_delta) + ", similarity trend " +
              (trend ? "ok" : "broken") + ", refinement change " + fmt(100 * worst_rel) + "%"};
}

// 3 -------------------------------------------------------------------------
Outcome edmd_exactness() {
  const Matrix half = Matrix::Constant(1, 1, 0.5);
  const Matrix one = Matrix::Ones(1, 1);
  const auto scalar_traces = testing::linear_traces(half, one, 5, 20, 1);
  const auto scalar_model = fit_edmd(scalar_traces, ObservableMap(1, 0, 1.0, 0), 1e-10);
  const double e1 = std::max(std::abs(scalar_model.A(0, 0) - 0.5), std::abs(scalar_model.B_in(0, 0) - 1.0));

  Matrix R(2, 2);
  R << std::cos(0.1), -std::sin(0.1), std::sin(0.1), std::cos(0.1);
  const auto rot_traces = testing::linear_traces(R, Matrix::Zero(2, 0), 4, 25, 3);
  const auto rot_model = fit_edmd(rot_traces, ObservableMap(2, 0, 1.0, 0), 1e-10);
  const double e2 = (rot_model.A - R).cwiseAbs().maxCoeff();

  const auto tune_traces = testing::linear_traces(half, one, 8, 30, 4);
  const auto tuned = tune(tune_traces, TuneGrid{}, 0);
  const bool picks_linear = tuned.map.feature_count() == 0;
  return {e1 < 1e-8 && e2 < 1e-8 && picks_linear,
          "scalar error " + fmt(e1) + ", rotation error " + fmt(e2) + ", tuner m_rff " +
              std::to_string(tuned.map.feature_count())};
}

// 4 -------------------------------------------------------------------------
Outcome mpc_correctness() {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_grad = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    KoopmanModel m;
    m.map = ObservableMap(3, 8, 1.5, rng());
    const auto d = static_cast<Eigen::Index>(m.map.lifted_dim());
    m.A = Matrix::NullaryExpr(d, d, [&] { return 0.3 * g(rng); });
    m.B_in = Matrix::NullaryExpr(d, 2, [&] { return g(rng); });
    MpcParams p;
    p.horizon = 6;
    p.effort_weight = 0.01;
    p.input_bounds = {{-1, 1}, {-1, 1}};
    const MpcPlanner planner(m, {0, 1}, p);
    const Vector g0 = m.map.lift((State(3) << u(rng), u(rng), u(rng)).finished());
    const Vector target = (Vector(2) << u(rng), u(rng)).finished();
    const Vector U = Vector::NullaryExpr(12, [&] { return u(rng); });
    const Vector analytic = planner.gradient(g0, target, U);
    const Vector numeric =
        testing::central_gradient([&](const Vector& x) { return planner.objective(g0, target, x); }, U, 1e-5);
    worst_grad = std::max(worst_grad, (analytic - numeric).norm() / analytic.norm());
  }

  KoopmanModel integrator;
  integrator.map = ObservableMap(1, 0, 1.0, 0);
  integrator.A = Matrix::Ones(1, 1);
  integrator.B_in = Matrix::Ones(1, 1);
  MpcParams p;
  p.horizon = 10;
  p.effort_weight = 0.1;
  p.input_bounds = {{-1.0, 1.0}};
  const auto U = plan(integrator, Vector::Zero(1), (Vector(1) << 5.0).finished(), std::vector<std::size_t>{0}, p);
  const double closed = 5.0 / (10.0 + 0.1);
  double split_err = 0.0;
  for (const auto& ui : U) split_err = std::max(split_err, std::abs(ui[0] - closed));

  const testing::LinearPlant plant(Matrix::Ones(1, 1), Matrix::Ones(1, 1), {{-1.0, 1.0}}, {0}, {{-20.0, 20.0}},
                                   State::Zero(1));
  MpcParams rh = p;
  rh.effort_weight = 1e-4;
  rh.target_tolerance = 0.01;
  const auto trace = run_mpc_simulation(plant, integrator, State::Zero(1), (Vector(1) << 5.0).finished(), 300, rh);
  const double miss = std::abs(trace.states.back()[0] - 5.0);
  return {worst_grad < 1e-5 && split_err < 1e-4 && miss <= 0.01,
          "gradient rel error " + fmt(worst_grad) + ", uniform split error " + fmt(split_err) +
              ", receding-horizon miss " + fmt(miss) + " after " + std::to_string(trace.steps()) + " steps"};
}

// 5 -------------------------------------------------------------------------
Outcome geometry_oracle() {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> n(0.0, 1.0);
  int disagreements = 0, inside = 0, total = 0;
  for (int dim : {2, 3, 5}) {
    int queries = 0;
    while (queries < 1000) {
      std::vector<Vector> pts;
      Matrix V(dim, 30);
      for (int i = 0; i < 30; ++i) {
        Vector p(dim);
        for (int k = 0; k < dim; ++k) p[k] = n(rng);
        pts.push_back(p);
        V.col(i) = p;
      }
      const ConvexRegion region(pts);
      for (int q = 0; q < 100; ++q, ++queries) {
        Vector p(dim);
        for (int k = 0; k < dim; ++k) p[k] = (dim == 5 ? 0.9 : 1.3) * n(rng);
        const bool a = region.contains(p, 1e-6);
        const bool b = testing::lp_in_hull(V, p);
        disagreements += a != b;
        inside += b;
        ++total;
      }
    }
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements on " + std::to_string(total) +
                                  " queries (" + std::to_string(inside) + " inside)"};
}

// 6 -------------------------------------------------------------------------
Outcome refinement_oracle() {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  int checked = 0, mismatches = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int count = 10 + static_cast<int>(u(rng) * 20);
    std::vector<DataTrace> traces;
    for (int t = 0; t < count; ++t) {
      const double ox = 10 * n(rng), oy = 10 * n(rng), vx = n(rng), vy = n(rng);
      DataTrace tr;
      for (int k = 0; k < 15; ++k) tr.states.push_back((State(2) << ox + vx * k, oy + vy * k).finished());
      for (int k = 0; k < 14; ++k) tr.inputs.push_back(ControlInput::Zero(1));
      traces.push_back(std::move(tr));
    }
    RefineParams p;
    p.k = 2 + static_cast<std::size_t>(u(rng) * 5);
    p.rate = std::vector<double>{0.3, 0.5, 0.7}[static_cast<std::size_t>(u(rng) * 3)];
    p.seed = rng();
    const auto r = refine_training_data(traces, p);
    const Matrix dist = distance_matrix(traces, p.resample_points);
    for (std::size_t c = 0; c < r.clusters.size(); ++c) {
      const auto& cluster = r.clusters[c];
      if (cluster.size() > 8) continue;
      const std::size_t want = selection_count(cluster.size(), p.rate);
      if (want < 2) continue;
      Matrix sub(cluster.size(), cluster.size());
      for (std::size_t i = 0; i < cluster.size(); ++i)
        for (std::size_t j = 0; j < cluster.size(); ++j)
          sub(i, j) = dist(static_cast<Eigen::Index>(cluster[i]), static_cast<Eigen::Index>(cluster[j]));
      const double best = testing::exhaustive_maxmin(sub, want);
      const double got = min_pairwise_distance(dist, r.selected_by_cluster[c]);
      ++checked;
      if (r.selected_by_cluster[c].size() != want || std::abs(got - best) > 1e-12 * std::max(1.0, best)) ++mismatches;
    }
  }
  return {mismatches == 0 && checked > 0,
          std::to_string(mismatches) + " mismatches over " + std::to_string(checked) + " clusters of <= 8 traces"};
}

TrainParams car_training(std::uint64_t seed) {
  TrainParams p;
  p.iterations = 4;
  p.sim_count = 20;
  p.initial_clusters = 5;
  p.steps = 100;
  p.seed = seed;
  return p;
}

// 7 -------------------------------------------------------------------------
Outcome training_trend() {
  const KinematicCarPlant car;
  int good = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto result = train_model(car, car_training(seed));
    bool ok = true;
    detail += (seed ? "; " : "") + std::string("seed ") + std::to_string(seed) + ":";
    for (std::size_t i = 0; i < result.iterations.size(); ++i) {
      detail += " " + fmt(result.iterations[i].refined_score, 4);
      if (i > 0) ok = ok && result.iterations[i].refined_score >= result.iterations[i - 1].refined_score;
    }
    good += ok;
  }
  return {good >= 4, std::to_string(good) + "/5 seeds non-decreasing (" + detail + ")"};
}

// 8 -------------------------------------------------------------------------
Outcome bound_mode_trend() {
  const KinematicCarPlant car;
  int good = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    double scores[2];
    int idx = 0;
    for (auto mode : {BoundMode::kFixedBox, BoundMode::kMultiHull}) {
      auto p = car_training(seed);
      p.bound_mode = mode;
      const auto result = train_model(car, p);
      scores[idx++] = suite_score(car.spec().objective, result.simulated);
    }
    good += scores[1] >= scores[0];
    detail += (seed ? "; " : "") + std::string("fixed ") + fmt(scores[0], 4) + " vs multi " + fmt(scores[1], 4);
  }
  return {good >= 4, std::to_string(good) + "/5 seeds multi-hull >= fixed box (" + detail + ")"};
}

// 9 -------------------------------------------------------------------------
Outcome headline() {
  CompareParams cp;
  cp.train = car_training(0);
  cp.test_count = 50;
  cp.steps = 100;
  cp.seeds = {0, 1, 2, 3, 4};
  std::string detail;
  bool pass = true;
  const KinematicCarPlant car;
  const PointMassPlant pm;
  for (const Plant* plant : {static_cast<const Plant*>(&car), static_cast<const Plant*>(&pm)}) {
    const auto report = compare_methods(*plant, cp);
    const double guided = report.methods[0].mean, random = report.methods[1].mean;
    const double ratio = guided / random;
    pass = pass && ratio >= 2.0;
    detail += plant->spec().name + " " + fmt(guided, 5) + " vs " + fmt(random, 5) + " (x" + fmt(ratio, 3) + "); ";
  }
  // ACAS Xu smoke run against the stub networks.
  const AcasXuPlant acas(std::make_shared<AcasNetworks>(make_stub_acas_networks()));
  CompareParams ac;
  ac.train.iterations = 2;
  ac.train.sim_count = 10;
  ac.train.steps = 60;
  ac.train.grid.m_rff = {0, 40};
  ac.train.grid.lengthscale_factors = {1.0, 5.0};
  ac.train.grid.regs = {1e-3};
  ac.test_count = 10;
  ac.steps = 60;
  ac.seeds = {0};
  const auto acas_report = compare_methods(acas, ac);
  pass = pass && acas_report.methods[0].mean > 0.0;
  detail += "acasxu stub smoke " + fmt(acas_report.methods[0].mean, 5);
  return {pass, detail};
}

// 10 ------------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_text_file(e.path());
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "explorer_acceptance_determinism";
  fs::remove_all(root);
  write_text_file(root / "car.json", R"({
  "plant": {"name": "kinematic_car"},
  "train": {"iterations": 2, "sim_count": 8, "initial_clusters": 4, "steps": 50},
  "tune": {"m_rff": [0, 40], "lengthscale_factors": [1, 5], "regs": [1e-3]},
  "test": {"count": 5, "steps": 50},
  "compare": {"seeds": [3, 4]},
  "seed": 9
})");
  std::vector<std::string> differing;
  std::vector<std::string> failed;
  for (const std::string cmd : {"train", "generate", "score", "compare"}) {
    std::string stdout_text[2];
    for (int run = 0; run < 2; ++run) {
      cli::CommandOptions o;
      o.config = root / "car.json";
      o.out = root / (cmd + std::to_string(run));
      o.model = root / "train0" / "model.json";
      o.traces = root / "generate0" / "cases";
      std::ostringstream out, err;
      int rc = 0;
      if (cmd == "train") rc = cli::cmd_train(o, out, err);
      if (cmd == "generate") rc = cli::cmd_generate(o, out, err);
      if (cmd == "score") rc = cli::cmd_score(o, out, err);
      if (cmd == "compare") rc = cli::cmd_compare(o, out, err);
      if (rc != 0) failed.push_back(cmd + ": " + err.str());
      // The only run-specific text is the output directory itself.
      std::string text = out.str();
      const std::string dir = o.out->string();
      for (auto pos = text.find(dir); pos != std::string::npos; pos = text.find(dir)) text.replace(pos, dir.size(), "<out>");
      stdout_text[run] = text;
    }
    if (stdout_text[0] != stdout_text[1]) differing.push_back(cmd + " stdout");
    if (cmd != "score") {
      // Output paths differ only by directory; manifests record relative names.
      const auto a = snapshot(root / (cmd + "0"));
      const auto b = snapshot(root / (cmd + "1"));
      if (a != b) differing.push_back(cmd + " files");
    }
  }
  std::string detail = differing.empty() ? "all outputs byte-identical" : "differs: ";
  for (const auto& d : differing) detail += d + " ";
  for (const auto& f : failed) detail += "[failed " + f + "] ";
  fs::remove_all(root);
  return {differing.empty() && failed.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria{
      {1, "two-state coverage score", 1.0, two_states},
      {2, "coverage-score properties", 30.0, coverage_properties},
      {3, "EDMD exactness", 10.0, edmd_exactness},
      {4, "MPC correctness", 30.0, mpc_correctness},
      {5, "hull containment vs LP", 60.0, geometry_oracle},
      {6, "max-min selection vs exhaustive", 30.0, refinement_oracle},
      {7, "training coverage trend", 600.0, training_trend},
      {8, "multi-hull vs fixed box", 600.0, bound_mode_trend},
      {9, "coverage-guided vs random", 900.0, headline},
      {10, "determinism", 600.0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d %-34s %s  %s [%.2fs / %.0fs%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs, c.limit_seconds, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

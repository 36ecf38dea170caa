#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "explorer/error.hpp"
#include "explorer/io.hpp"
#include "explorer/koopman.hpp"
#include "explorer/pipeline.hpp"
#include "oracles.hpp"

using namespace explorer;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Matrix rotation(double a) {
  Matrix R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

}  // namespace

TEST_CASE("lift with no features is the identity") {
  const ObservableMap map(3, 0, 1.0, 0);
  const State x = (State(3) << 1, -2, 3).finished();
  CHECK(map.lift(x) == x);
  CHECK(map.lifted_dim() == 3);
}

TEST_CASE("lift at zero with zero phases") {
  const std::size_t m = 8;
  const ObservableMap map(Matrix::Random(m, 2), Vector::Zero(m), 1.0, 0);
  const Vector g = map.lift(State::Zero(2));
  REQUIRE(g.size() == 10);
  for (Eigen::Index i = 2; i < 10; ++i) CHECK(g[i] == doctest::Approx(std::sqrt(2.0 / m)));
}

TEST_CASE("lift hand evaluation") {
  Matrix W(1, 2);
  W << 1, 0;
  const ObservableMap map(W, (Vector(1) << std::numbers::pi / 2).finished(), 1.0, 0);
  const Vector g = map.lift((State(2) << std::numbers::pi / 2, 7).finished());
  CHECK(g[2] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("lift is reproducible from the seed") {
  const ObservableMap a(4, 20, 2.0, 99), b(4, 20, 2.0, 99), c(4, 20, 2.0, 100);
  CHECK(a.frequencies() == b.frequencies());
  CHECK(a.phases() == b.phases());
  CHECK(a.frequencies() != c.frequencies());
}

TEST_CASE("EDMD recovers a scalar linear system") {
  const auto traces = testing::linear_traces(scalar(0.5), scalar(1.0), 5, 20, 1);
  const auto model = fit_edmd(traces, ObservableMap(1, 0, 1.0, 0), 1e-10);
  CHECK(std::abs(model.A(0, 0) - 0.5) < 1e-8);
  CHECK(std::abs(model.B_in(0, 0) - 1.0) < 1e-8);

  const auto held_out = testing::linear_traces(scalar(0.5), scalar(1.0), 1, 30, 2);
  CHECK(open_loop_rmse(model, held_out, 30) < 1e-6);
}

TEST_CASE("EDMD recovers a rotation without inputs") {
  const auto traces = testing::linear_traces(rotation(0.1), Matrix::Zero(2, 0), 4, 25, 3);
  const auto model = fit_edmd(traces, ObservableMap(2, 0, 1.0, 0), 1e-10);
  CHECK((model.A - rotation(0.1)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(model.B_in.cols() == 0);
}

TEST_CASE("heavy ridge shrinks the operator") {
  const auto traces = testing::linear_traces(scalar(0.5), scalar(1.0), 5, 20, 1);
  const auto model = fit_edmd(traces, ObservableMap(1, 0, 1.0, 0), 1e12);
  CHECK(std::abs(model.A(0, 0)) < 1e-9);
  CHECK(std::abs(model.B_in(0, 0)) < 1e-9);
}

TEST_CASE("too few snapshot pairs is an underdetermined fit") {
  const auto traces = testing::linear_traces(scalar(0.5), scalar(1.0), 1, 3, 1);
  try {
    fit_edmd(traces, ObservableMap(1, 10, 1.0, 0), 1e-6);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnderdeterminedFit);
  }
}

TEST_CASE("predict is a linear rollout") {
  KoopmanModel m;
  m.map = ObservableMap(1, 0, 1.0, 0);
  m.A = scalar(1.0);
  m.B_in = scalar(1.0);
  const InputVector u(3, ControlInput::Ones(1));
  const auto s = predict(m, State::Zero(1), u);
  REQUIRE(s.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(s[i][0] == i);

  m.A = scalar(0.0);
  m.B_in = scalar(0.0);
  const auto z = predict(m, State::Ones(1), u);
  for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i][0] == 0.0);
}

TEST_CASE("tuner prefers no features on exactly linear data") {
  const auto traces = testing::linear_traces(scalar(0.5), scalar(1.0), 8, 30, 4);
  const auto result = tune_with_report(traces, TuneGrid{}, 0);
  CHECK(result.model.map.feature_count() == 0);
  CHECK(result.candidates.size() == 4 * 4 * 3);
}

TEST_CASE("single-point grid returns that fit") {
  const auto traces = testing::linear_traces(scalar(0.9), scalar(0.2), 8, 30, 5);
  TuneGrid grid;
  grid.m_rff = {10};
  grid.lengthscale_factors = {1.0};
  grid.regs = {1e-3};
  const auto model = tune(traces, grid, 0);
  CHECK(model.map.feature_count() == 10);
  CHECK(model.reg == 1e-3);
}

TEST_CASE("tuned car model is no worse than the linear candidate") {
  const KinematicCarPlant car;
  Rng rng(3);
  const auto traces = generate_random_traces(car, 16, 60, rng);
  const auto result = tune_with_report(traces, TuneGrid{}, 1);
  double linear_best = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : result.candidates) {
    best = std::min(best, c.val_rmse);
    if (c.m_rff == 0) linear_best = std::min(linear_best, c.val_rmse);
  }
  CHECK(std::isfinite(result.model.val_rmse));
  CHECK(result.model.val_rmse <= linear_best);
  CHECK(result.model.val_rmse <= best * (1.0 + kTuneTieTolerance));
}

TEST_CASE("model persistence round trip and corruption") {
  const auto traces = testing::linear_traces(scalar(0.5), scalar(1.0), 6, 20, 1);
  const auto model = fit_edmd(traces, ObservableMap(1, 5, 0.7, 11), 1e-6);
  const auto dir = std::filesystem::temp_directory_path() / "explorer_model_test";
  std::filesystem::remove_all(dir);
  save_model(model, dir / "model.json");
  const auto loaded = load_model(dir / "model.json");
  CHECK(loaded.A == model.A);
  CHECK(loaded.B_in == model.B_in);
  CHECK(loaded.map.frequencies() == model.map.frequencies());
  CHECK(loaded.map.phases() == model.map.phases());

  write_text_file(dir / "model_A.csv", "1,2\nbroken\n");
  try {
    load_model(dir / "model.json");
    FAIL("expected a load error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

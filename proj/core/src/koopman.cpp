#include "explorer/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>

#include <json.hpp>

#include "explorer/error.hpp"
#include "explorer/io.hpp"

namespace explorer {

ObservableMap::ObservableMap(std::size_t state_dim, std::size_t m_rff, double lengthscale, std::uint64_t seed)
    : state_dim_(state_dim), lengthscale_(lengthscale), seed_(seed) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw Error(ErrorCode::kConfig, "lengthscale must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / lengthscale);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  frequencies_.resize(static_cast<Eigen::Index>(m_rff), static_cast<Eigen::Index>(state_dim));
  phases_.resize(static_cast<Eigen::Index>(m_rff));
  for (Eigen::Index r = 0; r < frequencies_.rows(); ++r) {
    for (Eigen::Index c = 0; c < frequencies_.cols(); ++c) frequencies_(r, c) = normal(rng);
    phases_[r] = phase(rng);
  }
}

ObservableMap::ObservableMap(Matrix frequencies, Vector phases, double lengthscale, std::uint64_t seed)
    : state_dim_(static_cast<std::size_t>(frequencies.cols())),
      frequencies_(std::move(frequencies)),
      phases_(std::move(phases)),
      lengthscale_(lengthscale),
      seed_(seed) {
  if (frequencies_.rows() != phases_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "frequency rows and phases differ in count");
  }
}

Vector ObservableMap::lift(const State& x) const {
  if (static_cast<std::size_t>(x.size()) != state_dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "lift: state has dimension " + std::to_string(x.size()) +
                                                   ", expected " + std::to_string(state_dim_));
  }
  Vector g(static_cast<Eigen::Index>(lifted_dim()));
  g.head(x.size()) = x;
  if (phases_.size() > 0) {
    const double scale = std::sqrt(2.0 / static_cast<double>(phases_.size()));
    g.tail(phases_.size()) = scale * ((frequencies_ * x + phases_).array().cos()).matrix();
  }
  return g;
}

Vector lift(const ObservableMap& map, const State& x) { return map.lift(x); }

KoopmanModel fit_edmd(std::span<const DataTrace> traces, const ObservableMap& map, double reg) {
  if (traces.empty()) throw Error(ErrorCode::kInsufficientData, "EDMD fit without traces");
  if (!(reg >= 0.0) || !std::isfinite(reg)) throw Error(ErrorCode::kConfig, "ridge coefficient must be >= 0");
  const auto n = map.state_dim();
  const auto w = traces.front().input_dim();
  const double dt = traces.front().dt;
  std::size_t pairs = 0;
  for (const auto& t : traces) {
    t.validate();
    if (t.state_dim() != n) throw Error(ErrorCode::kDimensionMismatch, "trace state dimension differs from the observable map");
    if (t.steps() > 0 && t.input_dim() != w) throw Error(ErrorCode::kDimensionMismatch, "traces differ in input dimension");
    if (t.dt != dt) throw Error(ErrorCode::kData, "traces differ in time step");
    pairs += t.steps();
  }
  const auto m = static_cast<Eigen::Index>(map.lifted_dim());
  const auto wi = static_cast<Eigen::Index>(w);
  if (pairs < static_cast<std::size_t>(m + wi)) {
    throw Error(ErrorCode::kUnderdeterminedFit, "EDMD needs at least " + std::to_string(m + wi) +
                                                    " snapshot pairs, got " + std::to_string(pairs));
  }

  // Z = [G; U] (regressors), Y = G+ (targets), one column per pair.
  Matrix Z(m + wi, static_cast<Eigen::Index>(pairs));
  Matrix Y(m, static_cast<Eigen::Index>(pairs));
  Eigen::Index col = 0;
  for (const auto& t : traces) {
    Vector g = map.lift(t.states.front());
    for (std::size_t k = 0; k < t.steps(); ++k) {
      Vector next = map.lift(t.states[k + 1]);
      Z.col(col).head(m) = g;
      if (wi > 0) Z.col(col).tail(wi) = t.inputs[k];
      Y.col(col) = next;
      g = std::move(next);
      ++col;
    }
  }

  Matrix gram = Z * Z.transpose();
  gram.diagonal().array() += reg;
  const Matrix cross = Y * Z.transpose();
  // [A B] * gram = cross, gram symmetric positive (semi)definite.
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "EDMD normal equations are singular");
  const Matrix AB = ldlt.solve(cross.transpose()).transpose();
  if (!AB.allFinite()) throw Error(ErrorCode::kNumerical, "EDMD produced non-finite coefficients");

  KoopmanModel model;
  model.A = AB.leftCols(m);
  model.B_in = AB.rightCols(wi);
  model.map = map;
  model.reg = reg;
  return model;
}

std::vector<State> predict(const KoopmanModel& model, const State& x0, std::span<const ControlInput> inputs) {
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  std::vector<State> out;
  out.reserve(inputs.size() + 1);
  Vector g = model.map.lift(x0);
  out.push_back(g.head(n));
  for (const auto& u : inputs) {
    g = model.A * g + model.B_in * u;
    out.push_back(g.head(n));
  }
  return out;
}

double open_loop_rmse(const KoopmanModel& model, std::span<const DataTrace> traces, std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorCode::kConfig, "validation horizon must be positive");
  double sum = 0.0;
  std::size_t count = 0;
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  for (const auto& t : traces) {
    const auto h = std::min(horizon, t.steps());
    if (h == 0) continue;
    for (std::size_t start = 0; start + h <= t.steps(); start += h) {
      Vector g = model.map.lift(t.states[start]);
      for (std::size_t j = 0; j < h; ++j) {
        g = model.A * g + model.B_in * t.inputs[start + j];
        sum += (g.head(n) - t.states[start + j + 1]).squaredNorm();
        count += static_cast<std::size_t>(n);
      }
    }
  }
  if (count == 0) throw Error(ErrorCode::kInsufficientData, "no validation windows");
  const double rmse = std::sqrt(sum / static_cast<double>(count));
  return std::isfinite(rmse) ? rmse : std::numeric_limits<double>::infinity();
}

namespace {

double mean_state_std(std::span<const DataTrace> traces) {
  const auto n = static_cast<Eigen::Index>(traces.front().state_dim());
  Vector sum = Vector::Zero(n);
  Vector sq = Vector::Zero(n);
  double count = 0.0;
  for (const auto& t : traces) {
    for (const auto& s : t.states) {
      sum += s;
      sq += s.cwiseProduct(s);
      count += 1.0;
    }
  }
  const Vector mean = sum / count;
  const Vector var = (sq / count - mean.cwiseProduct(mean)).cwiseMax(0.0);
  const double s = var.cwiseSqrt().mean();
  return s > 0.0 ? s : 1.0;
}

// True when `a` should replace the current best `b`.
bool better_candidate(const TuneCandidate& a, const TuneCandidate& b) {
  const double tie = kTuneTieTolerance * std::max({std::abs(a.val_rmse), std::abs(b.val_rmse), 1e-300});
  if (std::isfinite(a.val_rmse) && std::isfinite(b.val_rmse) && std::abs(a.val_rmse - b.val_rmse) <= tie) {
    if (a.m_rff != b.m_rff) return a.m_rff < b.m_rff;
    if (a.reg != b.reg) return a.reg > b.reg;
    return false;
  }
  return a.val_rmse < b.val_rmse;
}

}  // namespace

TuneResult tune_with_report(std::span<const DataTrace> traces, const TuneGrid& grid, std::uint64_t seed) {
  if (traces.size() < 4) throw Error(ErrorCode::kInsufficientData, "tuning needs at least 4 traces");
  if (grid.m_rff.empty() || grid.lengthscale_factors.empty() || grid.regs.empty()) {
    throw Error(ErrorCode::kConfig, "tuning grid has an empty axis");
  }
  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto val_count = std::max<std::size_t>(1, (traces.size() + 2) / 4);
  std::vector<DataTrace> train;
  std::vector<DataTrace> val;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < val_count ? val : train).push_back(traces[order[i]]);
  }
  const double base = mean_state_std(train);
  const auto n = train.front().state_dim();

  TuneResult result;
  std::optional<TuneCandidate> best;
  std::optional<KoopmanModel> best_model;
  for (auto m_rff : grid.m_rff) {
    for (double factor : grid.lengthscale_factors) {
      for (double reg : grid.regs) {
        TuneCandidate cand{m_rff, factor * base, reg, std::numeric_limits<double>::infinity()};
        std::optional<KoopmanModel> model;
        try {
          model = fit_edmd(train, ObservableMap(n, m_rff, cand.lengthscale, seed), reg);
          cand.val_rmse = open_loop_rmse(*model, val, grid.validation_horizon);
          model->val_rmse = cand.val_rmse;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kUnderdeterminedFit && e.code() != ErrorCode::kNumerical) throw;
        }
        result.candidates.push_back(cand);
        if (model && (!best || better_candidate(cand, *best))) {
          best = cand;
          best_model = std::move(model);
        }
      }
    }
  }
  if (!best_model) throw Error(ErrorCode::kInsufficientData, "no grid point could be fitted");
  result.model = std::move(*best_model);
  return result;
}

KoopmanModel tune(std::span<const DataTrace> traces, const TuneGrid& grid, std::uint64_t seed) {
  return tune_with_report(traces, grid, seed).model;
}

namespace {

std::filesystem::path sibling(const std::filesystem::path& json_path, const std::string& suffix) {
  auto stem = json_path.stem().string();
  return json_path.parent_path() / (stem + suffix);
}

}  // namespace

void save_model(const KoopmanModel& model, const std::filesystem::path& json_path) {
  const auto a_path = sibling(json_path, "_A.csv");
  const auto b_path = sibling(json_path, "_B.csv");
  nlohmann::ordered_json manifest;
  manifest["n"] = model.state_dim();
  manifest["w"] = model.input_dim();
  manifest["m_rff"] = model.map.feature_count();
  manifest["lengthscale"] = model.map.lengthscale();
  manifest["seed"] = model.map.seed();
  manifest["reg"] = model.reg;
  manifest["val_rmse"] = std::isfinite(model.val_rmse) ? nlohmann::ordered_json(model.val_rmse) : nlohmann::ordered_json();
  manifest["A"] = a_path.filename().string();
  manifest["B_in"] = b_path.filename().string();
  write_text_file(json_path, manifest.dump(2) + "\n");
  write_matrix_csv(a_path, model.A);
  write_matrix_csv(b_path, model.B_in);
}

KoopmanModel load_model(const std::filesystem::path& json_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, json_path.string() + ": " + e.what());
  }
  KoopmanModel model;
  std::size_t n = 0, w = 0, m_rff = 0;
  try {
    n = manifest.at("n").get<std::size_t>();
    w = manifest.at("w").get<std::size_t>();
    m_rff = manifest.at("m_rff").get<std::size_t>();
    model.map = ObservableMap(n, m_rff, manifest.at("lengthscale").get<double>(),
                              manifest.at("seed").get<std::uint64_t>());
    model.reg = manifest.at("reg").get<double>();
    const auto& rmse = manifest.at("val_rmse");
    model.val_rmse = rmse.is_null() ? std::numeric_limits<double>::infinity() : rmse.get<double>();
    model.A = read_matrix_csv(json_path.parent_path() / manifest.at("A").get<std::string>(), "A");
    model.B_in = read_matrix_csv(json_path.parent_path() / manifest.at("B_in").get<std::string>(), "B_in");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, json_path.string() + ": " + e.what());
  }
  const auto m = static_cast<Eigen::Index>(n + m_rff);
  if (model.A.rows() != m || model.A.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix A has shape " + std::to_string(model.A.rows()) + "x" +
                                                   std::to_string(model.A.cols()) + ", expected " +
                                                   std::to_string(m) + "x" + std::to_string(m));
  }
  if (model.B_in.rows() != m || model.B_in.cols() != static_cast<Eigen::Index>(w)) {
    if (!(w == 0 && model.B_in.size() == 0)) {
      throw Error(ErrorCode::kDimensionMismatch, "matrix B_in has shape " + std::to_string(model.B_in.rows()) +
                                                     "x" + std::to_string(model.B_in.cols()) + ", expected " +
                                                     std::to_string(m) + "x" + std::to_string(w));
    }
    model.B_in = Matrix::Zero(m, 0);
  }
  return model;
}

}  // namespace explorer

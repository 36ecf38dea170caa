#include "explorer/acas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "explorer/error.hpp"

namespace explorer {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

std::string_view to_string(Advisory a) {
  switch (a) {
    case Advisory::kCOC: return "COC";
    case Advisory::kWL: return "WL";
    case Advisory::kWR: return "WR";
    case Advisory::kSL: return "SL";
    case Advisory::kSR: return "SR";
  }
  return "?";
}

double turn_rate_deg(Advisory a) {
  switch (a) {
    case Advisory::kCOC: return 0.0;
    case Advisory::kWL: return 1.5;
    case Advisory::kWR: return -1.5;
    case Advisory::kSL: return 3.0;
    case Advisory::kSR: return -3.0;
  }
  return 0.0;
}

Advisory advisory_from_index(std::size_t index) {
  if (index >= kAdvisoryCount) throw Error(ErrorCode::kData, "advisory index out of range");
  return static_cast<Advisory>(index);
}

Advisory nn_advisory(const AcasNetworks& networks, double rho, double theta, double psi, double v_own,
                     double v_int, Advisory previous) {
  const auto& net = networks.by_previous[static_cast<std::size_t>(previous)];
  if (!net) {
    throw Error(ErrorCode::kConfig, "no ACAS network for previous advisory " + std::string(to_string(previous)));
  }
  Vector in(5);
  in << rho, theta, psi, v_own, v_int;
  if (!in.allFinite()) throw Error(ErrorCode::kData, "non-finite ACAS network input");
  const Vector out = net->evaluate(in);
  if (static_cast<std::size_t>(out.size()) != kAdvisoryCount) {
    throw Error(ErrorCode::kConfig, "ACAS network must have 5 outputs");
  }
  Eigen::Index best = 0;
  if (networks.selection == AdvisorySelection::kMinScore) {
    out.minCoeff(&best);
  } else {
    out.maxCoeff(&best);
  }
  return advisory_from_index(static_cast<std::size_t>(best));
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);  // [-pi, pi]
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

EncounterInputs encounter_inputs(const Aircraft& own, const Aircraft& intruder, ThetaConvention convention) {
  const double dx = intruder.x - own.x;
  const double dy = intruder.y - own.y;
  EncounterInputs in;
  in.rho = std::sqrt(dx * dx + dy * dy);
  const double scale = convention == ThetaConvention::kDoubled ? 2.0 : 1.0;
  double bearing = 0.0;
  const double denom = dx + in.rho;
  if (denom == 0.0) {
    bearing = dy == 0.0 ? std::numbers::pi : std::copysign(scale * std::numbers::pi / 2.0, dy);
  } else {
    bearing = scale * std::atan(dy / denom);
  }
  in.theta = wrap_angle(bearing - own.heading);
  in.psi = wrap_angle(intruder.heading - own.heading);
  return in;
}

namespace {

Aircraft fly(const Aircraft& a, double turn_rate, double dt) {
  const auto field = [&](const State& s, const ControlInput& u) {
    Vector d(3);
    d << a.speed * std::cos(s[2]), a.speed * std::sin(s[2]), u[0];
    return d;
  };
  State s(3);
  s << a.x, a.y, a.heading;
  ControlInput u(1);
  u << turn_rate;
  const State next = step_rk4(field, s, u, dt);
  return {next[0], next[1], next[2], a.speed};
}

}  // namespace

AcasScenario dubins_encounter_step(const AcasScenario& scenario, double intruder_turn_rate, double dt) {
  AcasScenario s = scenario;
  if (s.clock >= s.advisory_period - 1e-9) {
    if (!s.networks) throw Error(ErrorCode::kConfig, "ACAS scenario has no networks");
    const auto in = encounter_inputs(s.own, s.intruder, s.theta_convention);
    s.previous = nn_advisory(*s.networks, in.rho, in.theta, in.psi, s.own.speed, s.intruder.speed, s.previous);
    s.clock = 0.0;
  }
  const double u = std::clamp(intruder_turn_rate, -s.intruder_turn_limit, s.intruder_turn_limit);
  s.own = fly(s.own, turn_rate_deg(s.previous) * kDegToRad, dt);
  s.intruder = fly(s.intruder, u, dt);
  s.clock += dt;
  return s;
}

namespace {

PlantSpec acas_spec(const AcasPlantConfig& c) {
  PlantSpec spec;
  spec.name = "acasxu";
  spec.n = 7;
  spec.w = 1;
  const double limit = c.intruder_turn_limit_deg * kDegToRad;
  spec.input_bounds = {{-limit, limit}};
  spec.dt = c.advisory_period;
  spec.x0 = State(7);
  spec.x0 << c.own.x, c.own.y, c.own.heading, c.intruder.x, c.intruder.y, c.intruder.heading,
      static_cast<double>(Advisory::kCOC);
  spec.objective = ObjectiveSpace::make({3, 4}, c.objective_bounds);
  return spec;
}

}  // namespace

AcasXuPlant::AcasXuPlant(std::shared_ptr<const AcasNetworks> networks, AcasPlantConfig config)
    : Plant(acas_spec(config)), networks_(std::move(networks)), config_(std::move(config)) {
  if (!networks_) throw Error(ErrorCode::kConfig, "ACAS plant needs networks");
  if (!(config_.integration_dt > 0.0) || config_.integration_dt > config_.advisory_period) {
    throw Error(ErrorCode::kConfig, "ACAS integration step must lie in (0, advisory period]");
  }
}

State AcasXuPlant::step(const State& x, const ControlInput& u) const {
  if (x.size() != 7 || u.size() != 1) throw Error(ErrorCode::kDimensionMismatch, "ACAS plant expects x in R^7, u in R^1");
  AcasScenario s;
  s.own = {x[0], x[1], x[2], config_.own.speed};
  s.intruder = {x[3], x[4], x[5], config_.intruder.speed};
  const auto prev = std::clamp(std::llround(x[6]), 0LL, static_cast<long long>(kAdvisoryCount - 1));
  s.previous = advisory_from_index(static_cast<std::size_t>(prev));
  s.advisory_period = config_.advisory_period;
  s.clock = config_.advisory_period;
  s.intruder_turn_limit = config_.intruder_turn_limit_deg * kDegToRad;
  s.theta_convention = config_.theta_convention;
  s.networks = networks_;
  const auto substeps = static_cast<int>(std::llround(config_.advisory_period / config_.integration_dt));
  const double h = config_.advisory_period / substeps;
  for (int i = 0; i < substeps; ++i) s = dubins_encounter_step(s, u[0], h);
  State next(7);
  next << s.own.x, s.own.y, s.own.heading, s.intruder.x, s.intruder.y, s.intruder.heading,
      static_cast<double>(s.previous);
  return next;
}

NNetNetwork make_stub_acas_network() {
  constexpr double kPi = std::numbers::pi;
  NNetNetwork net;
  net.layer_sizes = {5, 3, 5};
  net.input_min = (Vector(5) << 0.0, -kPi, -kPi, 100.0, 0.0).finished();
  net.input_max = (Vector(5) << 60760.0, kPi, kPi, 1200.0, 1200.0).finished();
  net.input_mean = (Vector(5) << 19791.091, 0.0, 0.0, 650.0, 600.0).finished();
  net.input_range = (Vector(5) << 60261.0, 2.0 * kPi, 2.0 * kPi, 1100.0, 1200.0).finished();
  net.output_mean = 0.0;
  net.output_range = 1.0;

  // Hidden units: threat (active below ~5 km of range), intruder-left, intruder-right.
  Matrix W1 = Matrix::Zero(3, 5);
  Vector b1 = Vector::Zero(3);
  W1(0, 0) = -1.0;
  b1[0] = -0.245;
  W1(1, 1) = 1.0;
  W1(2, 1) = -1.0;

  // Output costs (COC, WL, WR, SL, SR); the smallest wins.
  Matrix W2(5, 3);
  W2 << 40.0, 0.0, 0.0,   //
      -25.0, 10.0, 0.0,   //
      -25.0, 0.0, 10.0,   //
      -30.0, 20.0, 0.0,   //
      -30.0, 0.0, 20.0;
  const Vector b2 = (Vector(5) << 0.1, 0.5, 0.5, 0.6, 0.6).finished();
  net.weights = {W1, W2};
  net.biases = {b1, b2};
  net.validate();
  return net;
}

AcasNetworks make_stub_acas_networks() {
  AcasNetworks nets;
  for (auto& n : nets.by_previous) n = make_stub_acas_network();
  return nets;
}

AcasNetworks load_acas_networks(const std::filesystem::path& directory, std::size_t tau_index) {
  AcasNetworks nets;
  for (std::size_t prev = 0; prev < kAdvisoryCount; ++prev) {
    const auto file = directory / ("ACASXU_run2a_" + std::to_string(prev + 1) + "_" + std::to_string(tau_index) +
                                   "_batch_2000.nnet");
    nets.by_previous[prev] = load_nnet(file.string());
  }
  return nets;
}

}  // namespace explorer

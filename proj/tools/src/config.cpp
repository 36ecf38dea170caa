#include "explorer/cli/config.hpp"

#include <set>

#include <json.hpp>

#include "explorer/error.hpp"
#include "explorer/io.hpp"

namespace explorer::cli {

namespace {

using nlohmann::json;

/// Object reader that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  Section sub(const std::string& key) { return Section(raw(key), path_ + "." + key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) fail_key(key, "must be a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    return to_count(raw(key), key);
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_unsigned()) fail_key(key, "must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_string()) fail_key(key, "must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array()) fail_key(key, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail_key(key, "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array()) fail_key(key, "must be an array of non-negative integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) out.push_back(to_count(e, key));
    return out;
  }

  std::vector<Interval> intervals(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) fail_key(key, "must be an array of [low, high] pairs");
    std::vector<Interval> out;
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        fail_key(key, "must be an array of [low, high] pairs");
      }
      out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.contains(it.key())) fail("unknown key '" + it.key() + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kConfig, "config " + path_ + ": " + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    throw Error(ErrorCode::kConfig, "config " + path_ + "." + key + ": " + msg);
  }

 private:
  std::size_t to_count(const json& v, const std::string& key) const {
    if (!v.is_number_unsigned()) fail_key(key, "must be a non-negative integer");
    return v.get<std::size_t>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Aircraft parse_aircraft(Section s, Aircraft a) {
  a.x = s.number("x", a.x);
  a.y = s.number("y", a.y);
  a.heading = s.number("heading", a.heading);
  a.speed = s.number("speed", a.speed);
  s.finish();
  return a;
}

PlantConfig parse_plant(Section s) {
  PlantConfig p;
  p.name = s.text("name", "");
  if (p.name == "point_mass") {
    p.max_speed = s.number("max_speed", p.max_speed);
    p.half_width = s.number("half_width", p.half_width);
  } else if (p.name == "kinematic_car") {
    p.dt = s.number("dt", p.dt);
  } else if (p.name == "acasxu") {
    p.networks = s.text("networks", p.networks);
    p.tau_index = s.count("tau_index", p.tau_index);
    const auto sel = s.text("selection", "argmin");
    if (sel == "argmin") {
      p.selection = AdvisorySelection::kMinScore;
    } else if (sel == "argmax") {
      p.selection = AdvisorySelection::kMaxScore;
    } else {
      s.fail_key("selection", "must be 'argmin' or 'argmax'");
    }
    const auto conv = s.text("theta_convention", "as_printed");
    if (conv == "as_printed") {
      p.acas.theta_convention = ThetaConvention::kAsPrinted;
    } else if (conv == "doubled") {
      p.acas.theta_convention = ThetaConvention::kDoubled;
    } else {
      s.fail_key("theta_convention", "must be 'as_printed' or 'doubled'");
    }
    p.acas.advisory_period = s.number("advisory_period", p.acas.advisory_period);
    p.acas.integration_dt = s.number("integration_dt", p.acas.integration_dt);
    p.acas.intruder_turn_limit_deg = s.number("intruder_turn_limit_deg", p.acas.intruder_turn_limit_deg);
    if (s.has("own")) p.acas.own = parse_aircraft(s.sub("own"), p.acas.own);
    if (s.has("intruder")) p.acas.intruder = parse_aircraft(s.sub("intruder"), p.acas.intruder);
  } else {
    s.fail_key("name", "unknown plant '" + p.name + "' (point_mass, kinematic_car, acasxu)");
  }
  s.finish();
  return p;
}

ObjectiveConfig parse_objective(Section s) {
  ObjectiveConfig o;
  o.projection = s.counts("projection", {});
  o.bounds = s.intervals("bounds");
  o.sigma = s.number("sigma", 0.0);
  o.cells_per_dim = s.count("cells_per_dim", 0);
  s.finish();
  if (o.projection.empty()) {
    for (std::size_t i = 0; i < o.bounds.size(); ++i) o.projection.push_back(i);
  }
  return o;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section s(root, "root");
  if (s.has("plant")) c.plant = parse_plant(s.sub("plant"));
  if (s.has("objective")) c.objective = parse_objective(s.sub("objective"));

  auto& t = c.train;
  if (s.has("train")) {
    Section ts = s.sub("train");
    t.iterations = ts.count("iterations", t.iterations);
    t.sim_count = ts.count("sim_count", t.sim_count);
    t.initial_clusters = ts.count("initial_clusters", t.initial_clusters);
    t.selection_rate = ts.number("selection_rate", t.selection_rate);
    t.steps = ts.count("steps", t.steps);
    t.resample_points = ts.count("resample_points", t.resample_points);
    t.box_margin = ts.number("box_margin", t.box_margin);
    try {
      t.bound_mode = parse_bound_mode(ts.text("bound_mode", std::string(to_string(t.bound_mode))));
    } catch (const Error& e) {
      ts.fail_key("bound_mode", e.what());
    }
    ts.finish();
  }
  if (s.has("sampler")) {
    Section ss = s.sub("sampler");
    t.sampler.max_attempts = ss.count("max_attempts", t.sampler.max_attempts);
    const auto fb = ss.text("fallback", "best_of_attempts");
    if (fb == "best_of_attempts") {
      t.sampler.fallback = SamplerFallback::kBestOfAttempts;
    } else if (fb == "error") {
      t.sampler.fallback = SamplerFallback::kError;
    } else {
      ss.fail_key("fallback", "must be 'best_of_attempts' or 'error'");
    }
    t.sampler.region_eps = ss.number("region_eps", t.sampler.region_eps);
    ss.finish();
  }
  if (s.has("mpc")) {
    Section ms = s.sub("mpc");
    t.mpc.horizon = ms.count("horizon", t.mpc.horizon);
    t.mpc.effort_weight = ms.number("effort_weight", t.mpc.effort_weight);
    t.mpc.pgd_iterations = ms.count("pgd_iterations", t.mpc.pgd_iterations);
    t.mpc.replan_every = ms.count("replan_every", t.mpc.replan_every);
    t.mpc.target_tolerance = ms.number("target_tolerance", t.mpc.target_tolerance);
    if (ms.has("input_bounds")) t.mpc.input_bounds = ms.intervals("input_bounds");
    ms.finish();
  }
  if (s.has("tune")) {
    Section gs = s.sub("tune");
    t.grid.m_rff = gs.counts("m_rff", t.grid.m_rff);
    t.grid.lengthscale_factors = gs.numbers("lengthscale_factors", t.grid.lengthscale_factors);
    t.grid.regs = gs.numbers("regs", t.grid.regs);
    t.grid.validation_horizon = gs.count("validation_horizon", t.grid.validation_horizon);
    gs.finish();
    if (t.grid.m_rff.empty() || t.grid.lengthscale_factors.empty() || t.grid.regs.empty()) {
      throw Error(ErrorCode::kConfig, "config root.tune: grid lists must be non-empty");
    }
  }
  if (s.has("test")) {
    Section xs = s.sub("test");
    c.test_count = xs.count("count", c.test_count);
    c.test_steps = xs.count("steps", c.test_steps);
    xs.finish();
  }
  if (s.has("compare")) {
    Section cs = s.sub("compare");
    if (cs.has("seeds")) {
      const auto& v = cs.raw("seeds");
      if (!v.is_array() || v.empty()) cs.fail_key("seeds", "must be a non-empty array of integers");
      c.seeds.clear();
      for (const auto& e : v) {
        if (!e.is_number_unsigned()) cs.fail_key("seeds", "must be a non-empty array of integers");
        c.seeds.push_back(e.get<std::uint64_t>());
      }
    }
    cs.finish();
  }
  c.seed = s.u64("seed", c.seed);
  c.output_dir = s.text("output_dir", c.output_dir);
  s.finish();

  try {
    t.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("config root.train: ") + e.what());
  }
  if (c.objective) (void)objective_from_config(c);
  c.echo = root.dump(2);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, "cannot read config file " + path.string() + ": " + e.what());
  }
  return parse_config(text);
}

ObjectiveSpace objective_from_config(const ExperimentConfig& config) {
  if (!config.objective) throw Error(ErrorCode::kConfig, "config has no objective section");
  const auto& o = *config.objective;
  try {
    auto space = ObjectiveSpace::make(o.projection, o.bounds, o.sigma, o.cells_per_dim);
    space.validate();
    return space;
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("config root.objective: ") + e.what());
  }
}

std::unique_ptr<Plant> make_plant(const ExperimentConfig& config) {
  if (!config.plant) throw Error(ErrorCode::kConfig, "config has no plant section");
  const auto& p = *config.plant;
  std::unique_ptr<Plant> plant;
  try {
    if (p.name == "point_mass") {
      plant = std::make_unique<PointMassPlant>(p.max_speed, p.half_width);
    } else if (p.name == "kinematic_car") {
      plant = std::make_unique<KinematicCarPlant>(p.dt);
    } else {
      auto nets = std::make_shared<AcasNetworks>(p.networks == "stub" ? make_stub_acas_networks()
                                                                       : load_acas_networks(p.networks, p.tau_index));
      nets->selection = p.selection;
      plant = std::make_unique<AcasXuPlant>(std::move(nets), p.acas);
    }
    if (config.objective) plant->set_objective(objective_from_config(config));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string("plant setup: ") + e.what());
  }
  return plant;
}

}  // namespace explorer::cli

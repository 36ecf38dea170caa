#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>

#include "explorer/nnet.hpp"
#include "explorer/plants.hpp"

namespace explorer {

enum class Advisory { kCOC = 0, kWL = 1, kWR = 2, kSL = 3, kSR = 4 };

inline constexpr std::size_t kAdvisoryCount = 5;

std::string_view to_string(Advisory a);
/// COC 0, WL +1.5, WR -1.5, SL +3.0, SR -3.0 (deg/s, positive = left).
double turn_rate_deg(Advisory a);
Advisory advisory_from_index(std::size_t index);

/// How the network outputs pick an advisory.
enum class AdvisorySelection { kMinScore, kMaxScore };

/// The five networks indexed by previous advisory.
struct AcasNetworks {
  std::array<std::optional<NNetNetwork>, kAdvisoryCount> by_previous;
  AdvisorySelection selection = AdvisorySelection::kMinScore;
};

/// Queries the network for `previous` on (rho, theta, psi, v_own, v_int).
Advisory nn_advisory(const AcasNetworks& networks, double rho, double theta, double psi, double v_own,
                     double v_int, Advisory previous);

/// Bearing formula variant: as printed, arctan(dy / (dx + rho)), or doubled
/// (2 * arctan(...)), which equals the geometric bearing.
enum class ThetaConvention { kAsPrinted, kDoubled };

struct Aircraft {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // rad
  double speed = 0.0;
};

struct EncounterInputs {
  double rho = 0.0;
  double theta = 0.0;
  double psi = 0.0;
};

/// Angle wrapped into (-pi, pi].
double wrap_angle(double a);

/// Network inputs from the two aircraft states. theta and psi are wrapped
/// into (-pi, pi]; the dx + rho = 0 singularity resolves to sign(dy) * pi/2
/// (pi when dy = 0) before subtracting the ownship heading.
EncounterInputs encounter_inputs(const Aircraft& own, const Aircraft& intruder,
                                 ThetaConvention convention = ThetaConvention::kAsPrinted);

struct AcasScenario {
  Aircraft own;
  Aircraft intruder;
  Advisory previous = Advisory::kCOC;
  double tau = 0.0;
  double advisory_period = 1.0;
  /// Time since the last network query; at or past the period, the next
  /// step queries first.
  double clock = 1.0;
  double intruder_turn_limit = 3.0 * 3.14159265358979323846 / 180.0;  // rad/s
  ThetaConvention theta_convention = ThetaConvention::kAsPrinted;
  std::shared_ptr<const AcasNetworks> networks;
};

/// Both aircraft follow Dubins kinematics (RK4 over dt). The intruder turns
/// at `intruder_turn_rate` (rad/s, clamped to its limit); the ownship turns
/// at the rate of its current advisory, refreshed at each advisory-period
/// boundary.
AcasScenario dubins_encounter_step(const AcasScenario& scenario, double intruder_turn_rate, double dt);

struct AcasPlantConfig {
  Aircraft own{0.0, 0.0, 1.5707963267948966, 200.0};
  Aircraft intruder{8000.0, 8000.0, 3.141592653589793, 200.0};
  double advisory_period = 1.0;
  double integration_dt = 0.1;
  double intruder_turn_limit_deg = 3.0;
  ThetaConvention theta_convention = ThetaConvention::kAsPrinted;
  std::vector<Interval> objective_bounds{{-15000.0, 30000.0}, {-15000.0, 30000.0}};
};

/// Two-aircraft encounter as a plant. State (x_own, y_own, psi_own, x_int,
/// y_int, psi_int, a_prev), input: intruder turn rate in rad/s; one plant
/// step is one advisory period. Objective: intruder position.
class AcasXuPlant final : public Plant {
 public:
  AcasXuPlant(std::shared_ptr<const AcasNetworks> networks, AcasPlantConfig config = {});

  State step(const State& x, const ControlInput& u) const override;

  const AcasPlantConfig& config() const { return config_; }

 private:
  std::shared_ptr<const AcasNetworks> networks_;
  AcasPlantConfig config_;
};

/// Hand-built ReLU network standing in for the ACAS Xu tables: clear of
/// conflict when far, weak then strong turns away from the intruder side as
/// range closes. Mirror-symmetric under (theta, psi) -> (-theta, -psi) with
/// left/right swapped.
NNetNetwork make_stub_acas_network();
/// The stub network for all five previous advisories.
AcasNetworks make_stub_acas_networks();

/// Loads `ACASXU_run2a_{prev}_{tau}_batch_2000.nnet` for prev = 1..5 from
/// `directory` (the publicly distributed naming).
AcasNetworks load_acas_networks(const std::filesystem::path& directory, std::size_t tau_index = 1);

}  // namespace explorer

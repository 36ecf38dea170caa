#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "explorer/acas.hpp"
#include "explorer/coverage.hpp"
#include "explorer/pipeline.hpp"
#include "explorer/plants.hpp"

namespace explorer::cli {

struct PlantConfig {
  std::string name;  // point_mass | kinematic_car | acasxu
  double dt = 0.1;
  double max_speed = 1.0;
  double half_width = 100.0;
  // acasxu
  std::string networks = "stub";  // "stub" or a directory of .nnet files
  std::size_t tau_index = 1;
  AdvisorySelection selection = AdvisorySelection::kMinScore;
  AcasPlantConfig acas;
};

struct ObjectiveConfig {
  std::vector<std::size_t> projection;
  std::vector<Interval> bounds;
  double sigma = 0.0;
  std::size_t cells_per_dim = 0;
};

struct ExperimentConfig {
  std::optional<PlantConfig> plant;
  std::optional<ObjectiveConfig> objective;
  TrainParams train;
  std::size_t test_count = 50;
  std::size_t test_steps = 100;
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  /// Normalised echo of the parsed configuration (JSON text).
  std::string echo;
};

/// Strict JSON parsing: unknown keys, wrong types and out-of-range values
/// throw ErrorCode::kConfig naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Objective space from the config alone (for scoring without a plant).
ObjectiveSpace objective_from_config(const ExperimentConfig& config);

std::unique_ptr<Plant> make_plant(const ExperimentConfig& config);

}  // namespace explorer::cli

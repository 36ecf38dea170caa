#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "explorer/cli/commands.hpp"
#include "explorer/cli/config.hpp"
#include "explorer/io.hpp"

#ifndef EXPLORER_SOURCE_DIR
#define EXPLORER_SOURCE_DIR "."
#endif

using namespace explorer;
using namespace explorer::cli;
namespace fs = std::filesystem;

namespace {

const char* kSmallCar = R"({
  "plant": {"name": "kinematic_car"},
  "train": {"iterations": 2, "sim_count": 8, "initial_clusters": 4, "steps": 30},
  "tune": {"m_rff": [0, 20], "lengthscale_factors": [1, 5], "regs": [1e-3]},
  "test": {"count": 1, "steps": 30},
  "compare": {"seeds": [1, 2]}
})";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("explorer_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CommandOptions options(const fs::path& config, const fs::path& out) {
  CommandOptions o;
  o.config = config;
  o.out = out;
  return o;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  CHECK_NOTHROW(parse_config(kSmallCar));
  CHECK_THROWS_AS(parse_config(R"({"plant": {"name": "kinematic_car"}, "bogus": 1})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"train": {"iterations": -1}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"train": {"iterations": 0}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"plant": {"name": "submarine"}})"), Error);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  try {
    parse_config(R"({"mpc": {"horizon": 3, "horizn": 4}})");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("horizn") != std::string::npos);
  }
}

TEST_CASE("missing config file exits with code 2 naming the path") {
  std::ostringstream out, err;
  CommandOptions o;
  o.config = "/nonexistent/config.json";
  CHECK(cmd_train(o, out, err) == 2);
  CHECK(err.str().find("/nonexistent/config.json") != std::string::npos);
}

TEST_CASE("train, generate and score round trip") {
  const auto dir = scratch("roundtrip");
  write_text_file(dir / "car.json", kSmallCar);
  std::ostringstream out, err;
  REQUIRE(cmd_train(options(dir / "car.json", dir / "train"), out, err) == 0);
  const std::string manifest = read_text_file(dir / "train" / "manifest.json");
  CHECK(manifest.find("\"iterations\"") != std::string::npos);
  CHECK(fs::exists(dir / "train" / "model.json"));
  CHECK(fs::exists(dir / "train" / "iterations" / "clusters_0001.csv"));

  auto gen = options(dir / "car.json", dir / "gen");
  gen.model = dir / "train" / "model.json";
  REQUIRE(cmd_generate(gen, out, err) == 0);
  std::size_t cases = 0;
  for (const auto& e : fs::directory_iterator(dir / "gen" / "cases")) cases += e.path().extension() == ".csv";
  CHECK(cases == 1);

  auto score = options(dir / "car.json", dir / "unused");
  score.traces = dir / "gen" / "cases";
  std::ostringstream scored;
  REQUIRE(cmd_score(score, scored, err) == 0);
  const std::string report = read_text_file(dir / "gen" / "score.json");
  std::string line = scored.str();
  line.pop_back();
  CHECK(report.find("\"score_text\": \"" + line + "\"") != std::string::npos);

  // Duplicating a trace file leaves the score unchanged.
  fs::copy_file(dir / "gen" / "cases" / "case_0000.csv", dir / "gen" / "cases" / "case_0001.csv");
  std::ostringstream again;
  REQUIRE(cmd_score(score, again, err) == 0);
  CHECK(again.str() == scored.str());
}

TEST_CASE("generate reports model problems as data errors") {
  const auto dir = scratch("badmodel");
  write_text_file(dir / "car.json", kSmallCar);
  write_text_file(dir / "pm.json", R"({"plant": {"name": "point_mass"},
    "train": {"iterations": 1, "sim_count": 8, "initial_clusters": 4, "steps": 20},
    "tune": {"m_rff": [0], "lengthscale_factors": [1], "regs": [1e-3]}})");
  std::ostringstream out, err;
  REQUIRE(cmd_train(options(dir / "pm.json", dir / "pm"), out, err) == 0);

  auto gen = options(dir / "car.json", dir / "gen");
  gen.model = dir / "pm" / "model.json";
  CHECK(cmd_generate(gen, out, err) == 3);

  write_text_file(dir / "pm" / "model_B.csv", "1,x\n");
  std::ostringstream err2;
  auto gen2 = options(dir / "pm.json", dir / "gen2");
  gen2.model = dir / "pm" / "model.json";
  CHECK(cmd_generate(gen2, out, err2) == 3);
  CHECK(err2.str().find("B_in") != std::string::npos);
}

TEST_CASE("score edge cases") {
  const auto dir = scratch("score");
  write_text_file(dir / "two_states.json", R"({"objective": {"bounds": [[0, 100]], "sigma": 3, "cells_per_dim": 256}})");
  fs::create_directories(dir / "empty");
  CommandOptions o;
  o.config = dir / "two_states.json";
  o.traces = dir / "empty";
  std::ostringstream out, err;
  REQUIRE(cmd_score(o, out, err) == 0);
  CHECK(out.str() == "0\n");

  o.traces = fs::path(EXPLORER_SOURCE_DIR) / "data" / "two_states";
  std::ostringstream two_states;
  REQUIRE(cmd_score(o, two_states, err) == 0);
  CHECK(std::stod(two_states.str()) == doctest::Approx(2.0).epsilon(0.01));

  write_text_file(dir / "bad" / "t.csv", "t,x0\n0,1\n1,oops\n");
  o.traces = dir / "bad";
  std::ostringstream bad_err;
  CHECK(cmd_score(o, out, bad_err) == 3);
  CHECK(bad_err.str().find("row") != std::string::npos);
}

TEST_CASE("compare writes per-seed rows deterministically") {
  const auto dir = scratch("compare");
  write_text_file(dir / "car.json", kSmallCar);
  std::ostringstream out, err;
  REQUIRE(cmd_compare(options(dir / "car.json", dir / "a"), out, err) == 0);
  REQUIRE(cmd_compare(options(dir / "car.json", dir / "b"), out, err) == 0);
  const std::string a = read_text_file(dir / "a" / "per_seed.csv");
  CHECK(std::count(a.begin(), a.end(), '\n') == 5);
  CHECK(a == read_text_file(dir / "b" / "per_seed.csv"));
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorCode::kConfig) == 2);
  CHECK(exit_code_for(ErrorCode::kParse) == 3);
  CHECK(exit_code_for(ErrorCode::kDimensionMismatch) == 3);
  CHECK(exit_code_for(ErrorCode::kNumerical) == 4);
}

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "explorer/error.hpp"

namespace explorer::cli {

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::filesystem::path model;   // generate
  std::filesystem::path traces;  // score: a directory or a single CSV
};

/// 0 success, 2 config, 3 data/model, 4 numerical failure.
int exit_code_for(ErrorCode code);

/// Each command returns its exit code; errors are reported on `err`.
int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_score(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace explorer::cli

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "explorer/cli/commands.hpp"

int main(int argc, char** argv) {
  using explorer::cli::CommandOptions;
  CLI::App app{"Coverage-guided test generation for cyber-physical systems"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out, "Override the output directory");
  };

  auto* train = app.add_subcommand("train", "Iterative coverage-guided model training");
  common(train);
  auto* generate = app.add_subcommand("generate", "Generate test cases with a trained model");
  common(generate);
  generate->add_option("--model", opts.model, "model.json written by train")->required();
  auto* score = app.add_subcommand("score", "Coverage score of stored traces");
  common(score);
  score->add_option("--traces", opts.traces, "Trace CSV or directory of trace CSVs")->required();
  auto* compare = app.add_subcommand("compare", "Coverage-guided vs random baseline over seeds");
  common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  for (auto* sub : {train, generate, score, compare}) {
    if (sub->parsed() && sub->count("--seed") > 0) opts.seed = seed;
    if (sub->parsed() && sub->count("--out") > 0) opts.out = out;
  }
  if (train->parsed()) return explorer::cli::cmd_train(opts, std::cout, std::cerr);
  if (generate->parsed()) return explorer::cli::cmd_generate(opts, std::cout, std::cerr);
  if (score->parsed()) return explorer::cli::cmd_score(opts, std::cout, std::cerr);
  return explorer::cli::cmd_compare(opts, std::cout, std::cerr);
}

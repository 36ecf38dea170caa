#include "explorer/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "explorer/cli/config.hpp"
#include "explorer/io.hpp"
#include "explorer/koopman.hpp"
#include "explorer/pipeline.hpp"

namespace explorer::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return 2;
    case ErrorCode::kNumerical:
    case ErrorCode::kIntegration: return 4;
    default: return 3;
  }
}

namespace {

struct Context {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  fs::path out;
};

Context load_context(const CommandOptions& opts) {
  Context ctx;
  ctx.config = load_config(opts.config);
  ctx.seed = opts.seed.value_or(ctx.config.seed);
  ctx.out = opts.out.value_or(fs::path(ctx.config.output_dir));
  return ctx;
}

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

std::string numbered(const std::string& prefix, std::size_t i, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return prefix + buf + ext;
}

ordered_json header(const char* command, const Context& ctx) {
  ordered_json m;
  m["command"] = command;
  m["seed"] = ctx.seed;
  m["config"] = ordered_json::parse(ctx.config.echo);
  return m;
}

void write_json(const fs::path& path, const ordered_json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string vector_row(const Vector& v) {
  std::string row;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) row += ',';
    row += format_number(v[i]);
  }
  return row;
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

constexpr const char* kTrainTracesDir = "train_traces";

}  // namespace

int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&] {
        const Context ctx = load_context(opts);
        const auto plant = make_plant(ctx.config);
        TrainParams params = ctx.config.train;
        params.seed = ctx.seed;
        ordered_json manifest = header("train", ctx);
        manifest["plant"] = plant->spec().name;

        const TrainResult result = train_model(*plant, params);

        save_model(result.model, ctx.out / "model.json");
        ordered_json iterations = ordered_json::array();
        for (const auto& rec : result.iterations) {
          const auto clusters_file = "iterations/" + numbered("clusters_", rec.iteration, ".csv");
          const auto regions_file = "iterations/" + numbered("regions_", rec.iteration, ".csv");
          const auto targets_file = "iterations/" + numbered("targets_", rec.iteration, ".csv");
          write_text_file(ctx.out / clusters_file, cluster_assignment_csv(rec.clusters));
          write_text_file(ctx.out / regions_file, regions_csv(rec.regions));
          std::string targets;
          for (const auto& t : rec.targets) targets += vector_row(t) + "\n";
          write_text_file(ctx.out / targets_file, targets);
          ordered_json box = ordered_json::array();
          for (const auto& a : rec.box.axes) box.push_back({a.low, a.high});
          iterations.push_back({{"iteration", rec.iteration},
                                {"cluster_count", rec.cluster_count},
                                {"pool_size", rec.pool_size},
                                {"refined_size", rec.refined_size},
                                {"refined_score", rec.refined_score},
                                {"val_rmse", rec.val_rmse},
                                {"m_rff", rec.m_rff},
                                {"lengthscale", rec.lengthscale},
                                {"reg", rec.reg},
                                {"box", box},
                                {"region_count", rec.regions.size()},
                                {"field_score", rec.field_score},
                                {"clusters_file", clusters_file},
                                {"regions_file", regions_file},
                                {"targets_file", targets_file}});
        }
        ordered_json traces = ordered_json::array();
        for (std::size_t i = 0; i < result.simulated.size(); ++i) {
          const auto name = std::string(kTrainTracesDir) + "/" + numbered("trace_", i, ".csv");
          write_trace(ctx.out / name, result.simulated[i]);
          traces.push_back(name);
        }
        write_text_file(ctx.out / "field.csv", result.field.snapshot_csv());
        manifest["iterations"] = iterations;
        manifest["model"] = "model.json";
        manifest["field"] = "field.csv";
        manifest["traces"] = traces;
        write_json(ctx.out / "manifest.json", manifest);

        for (const auto& rec : result.iterations) {
          out << "iteration " << rec.iteration << ": clusters " << rec.cluster_count << ", refined "
              << rec.refined_size << "/" << rec.pool_size << ", refined score " << format_number(rec.refined_score)
              << ", val rmse " << format_number(rec.val_rmse) << "\n";
        }
        out << "model written to " << (ctx.out / "model.json").string() << "\n";
      },
      err);
}

int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&] {
        const Context ctx = load_context(opts);
        const auto plant = make_plant(ctx.config);
        const KoopmanModel model = load_model(opts.model);
        const auto& spec = plant->spec();
        if (model.state_dim() != spec.n || model.input_dim() != spec.w) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "model (n=" + std::to_string(model.state_dim()) + ", w=" + std::to_string(model.input_dim()) +
                          ") does not fit plant " + spec.name + " (n=" + std::to_string(spec.n) +
                          ", w=" + std::to_string(spec.w) + ")");
        }

        // Carry the coverage of the training simulations, if they sit next to the model.
        OccupancyField field(spec.objective);
        const auto train_dir = opts.model.parent_path() / kTrainTracesDir;
        if (fs::is_directory(train_dir)) {
          for (const auto& f : csv_files(train_dir)) {
            const DataTrace t = read_trace(f);
            if (t.origin == TraceOrigin::kCoverageGuided) field.insert(t.states);
          }
        }

        TestParams params;
        params.count = ctx.config.test_count;
        params.steps = ctx.config.test_steps;
        params.sampler = ctx.config.train.sampler;
        params.mpc = ctx.config.train.mpc;
        params.seed = ctx.seed;
        const TestSuite suite = generate_test_cases(*plant, model, field, params);

        ordered_json manifest = header("generate", ctx);
        manifest["plant"] = spec.name;
        manifest["model"] = fs::absolute(opts.model).lexically_normal().string();
        ordered_json cases = ordered_json::array();
        std::string targets = "case,";
        for (std::size_t d = 0; d < spec.objective.dim(); ++d) targets += "target" + std::to_string(d) + ",";
        targets += "score\n";
        for (std::size_t i = 0; i < suite.cases.size(); ++i) {
          const auto name = "cases/" + numbered("case_", i, ".csv");
          write_trace(ctx.out / name, suite.cases[i].trace);
          targets += std::to_string(i) + "," + vector_row(suite.cases[i].target) + "," +
                     format_number(suite.incremental_scores[i]) + "\n";
          ordered_json target = ordered_json::array();
          for (Eigen::Index d = 0; d < suite.cases[i].target.size(); ++d) target.push_back(suite.cases[i].target[d]);
          cases.push_back({{"trace", name}, {"target", target}, {"score", suite.incremental_scores[i]}});
        }
        write_text_file(ctx.out / "targets.csv", targets);
        ordered_json report{{"count", suite.cases.size()},
                            {"score", suite.final_score},
                            {"score_text", format_number(suite.final_score)}};
        write_json(ctx.out / "score.json", report);
        manifest["cases"] = cases;
        manifest["score"] = suite.final_score;
        write_json(ctx.out / "manifest.json", manifest);
        out << "coverage score " << format_number(suite.final_score) << " over " << suite.cases.size()
            << " test cases\n";
      },
      err);
}

int cmd_score(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&] {
        const ExperimentConfig config = load_config(opts.config);
        const ObjectiveSpace space = config.objective ? objective_from_config(config)
                                                      : make_plant(config)->spec().objective;
        std::vector<fs::path> files;
        if (fs::is_directory(opts.traces)) {
          files = csv_files(opts.traces);
        } else if (fs::is_regular_file(opts.traces)) {
          files.push_back(opts.traces);
        } else {
          throw Error(ErrorCode::kIo, "no trace file or directory at " + opts.traces.string());
        }
        std::vector<DataTrace> traces;
        for (const auto& f : files) {
          traces.push_back(read_trace(f));
          if (traces.back().state_dim() != traces.front().state_dim()) {
            throw Error(ErrorCode::kDimensionMismatch, "trace " + f.string() + " has state dimension " +
                                                           std::to_string(traces.back().state_dim()) + ", expected " +
                                                           std::to_string(traces.front().state_dim()));
          }
        }
        if (!traces.empty()) space.validate(traces.front().state_dim());
        out << format_number(suite_score(space, traces)) << "\n";
      },
      err);
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&] {
        const Context ctx = load_context(opts);
        const auto plant = make_plant(ctx.config);
        CompareParams params;
        params.train = ctx.config.train;
        params.test_count = ctx.config.test_count;
        params.steps = ctx.config.test_steps;
        params.seeds = ctx.config.seeds;
        if (opts.seed) params.seeds = {*opts.seed};
        const ComparisonReport report = compare_methods(*plant, params);

        std::string csv = "seed,method,score\n";
        for (const auto& r : report.per_seed) {
          csv += std::to_string(r.seed) + "," + r.method + "," + format_number(r.score) + "\n";
        }
        write_text_file(ctx.out / "per_seed.csv", csv);
        ordered_json manifest = header("compare", ctx);
        manifest["plant"] = plant->spec().name;
        ordered_json rows = ordered_json::array();
        std::ostringstream table;
        table << "method,mean,std,plant_steps_per_seed\n";
        for (const auto& m : report.methods) {
          rows.push_back({{"method", m.method}, {"mean", m.mean}, {"std", m.stddev}, {"plant_steps", m.plant_steps}});
          table << m.method << "," << format_number(m.mean) << "," << format_number(m.stddev) << "," << m.plant_steps
                << "\n";
        }
        write_text_file(ctx.out / "comparison.csv", table.str());
        manifest["methods"] = rows;
        manifest["per_seed"] = "per_seed.csv";
        write_json(ctx.out / "manifest.json", manifest);
        out << table.str();
      },
      err);
}

}  // namespace explorer::cli

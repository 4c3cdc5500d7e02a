#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tactile_pack/config.hpp"
#include "tactile_pack/harness.hpp"
#include "tactile_pack/tactile.hpp"
#include "tactile_pack/version.hpp"

namespace fs = std::filesystem;
using namespace tactile_pack;

namespace {

constexpr double kDefaultFitLambda = 1e-3;

struct Overrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> estimator;
  std::optional<std::string> weights;
  std::optional<int> episodes;
  std::string shape;
};

struct DatagenArgs {
  Overrides common;
  std::string out;
  int dump_markers = 0;
};

struct FitArgs {
  std::string dataset;
  std::string out;
  double reg_lambda = kDefaultFitLambda;
};

struct ExperimentArgs {
  Overrides common;
  std::string out_dir;
};

struct ReportArgs {
  std::vector<std::string> run_dirs;
  std::string out;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double>(elapsed).count();
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

RunConfig load_run_config(const Overrides& o) {
  RunConfig run = run_config_from_file(parse_config_file(o.config_path));
  if (o.seed) run.seed = *o.seed;
  if (o.threads) run.threads = *o.threads;
  if (o.estimator) run.estimator = estimator_kind_from_name(*o.estimator);
  if (o.weights) run.weights_path = *o.weights;
  if (o.episodes) run.episodes = *o.episodes;
  if (!o.shape.empty()) {
    std::vector<ShapeEntry> kept;
    for (const auto& entry : run.shapes) {
      if (entry.name == o.shape) kept.push_back(entry);
    }
    if (kept.empty()) {
      throw ConfigError("config declares no shape named '" + o.shape + "'");
    }
    run.shapes = std::move(kept);
  }
  run.validate();
  return run;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

void cmd_datagen(const DatagenArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig run = load_run_config(args.common);
  ensure_parent_dir(args.out);

  Dataset dataset;
  long total_attempts = 0;
  for (const auto& entry : run.shapes) {
    const ExperimentConfig cfg = make_experiment_config(run, entry);
    SampleObserver observer;
    if (args.dump_markers > 0) {
      observer = [&](const TactileSequence& seq, const DatasetSample&, int index) {
        if (index >= args.dump_markers) return;
        const std::string prefix =
            args.out + "." + entry.name + ".sample" + std::to_string(index);
        auto csv = open_out(prefix + ".csv");
        dump_sequence_csv(seq, csv);
        dump_sequence_pgm(seq, prefix);
      };
    }
    CollectResult result = collect_dataset(cfg, run.samples_per_shape, observer);
    total_attempts += result.attempts;

    std::array<long, kDirectionClassCount> counts{};
    long dominant = 0;
    for (const auto& s : result.dataset.samples) {
      ++counts[static_cast<int>(s.class_label)];
      if (s.dominant_labeled) ++dominant;
    }
    std::cout << "shape " << entry.name << ": kept " << result.dataset.samples.size()
              << " samples (attempts " << result.attempts << ", dominant-labeled " << dominant
              << ")\n  class counts:";
    for (int c = 0; c < kDirectionClassCount; ++c) {
      std::cout << ' ' << c << ':' << counts[c];
    }
    std::cout << '\n';

    if (dataset.samples.empty()) dataset.feature_dim = result.dataset.feature_dim;
    for (auto& s : result.dataset.samples) dataset.samples.push_back(std::move(s));
  }

  save_dataset(dataset, args.out);
  std::cout << "dataset: " << dataset.samples.size() << " samples (" << total_attempts
            << " attempts) -> " << args.out << '\n';
  write_manifest(args.out + ".manifest.json", config_snapshot(run), run.seed, {args.out},
                 seconds_since(start));
}

void cmd_fit(const FitArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset dataset = load_dataset(args.dataset);
  if (dataset.samples.empty()) {
    throw std::runtime_error("dataset is empty: " + args.dataset);
  }

  // Deterministic 80/20 split: every fifth sample is held out.
  std::vector<TrainingSample> all = to_training_samples(dataset);
  std::vector<TrainingSample> train;
  std::vector<TrainingSample> test;
  for (size_t i = 0; i < all.size(); ++i) {
    (i % 5 == 4 ? test : train).push_back(std::move(all[i]));
  }

  std::array<bool, kDirectionClassCount> seen{};
  int distinct = 0;
  for (const auto& s : train) {
    if (!seen[static_cast<int>(s.label)]) {
      seen[static_cast<int>(s.label)] = true;
      ++distinct;
    }
  }
  if (distinct < 2) {
    throw std::runtime_error("training split has fewer than two direction classes");
  }

  const LinearEstimator estimator = fit_linear_estimator(train, args.reg_lambda);

  long correct = 0;
  double mae_x = 0.0;
  double mae_theta = 0.0;
  for (const auto& s : test) {
    const auto [cls, est] = predict(estimator, s.features);
    if (cls == s.label) ++correct;
    mae_x += std::abs(est.dx_e - s.dx);
    mae_theta += std::abs(est.dtheta_e - s.dtheta);
  }
  ensure_parent_dir(args.out);
  save_estimator(estimator, args.out);

  std::cout << "fit: " << dataset.samples.size() << " samples, train " << train.size()
            << ", test " << test.size() << ", lambda " << args.reg_lambda << '\n';
  if (!test.empty()) {
    std::printf("held-out direction accuracy: %.4f\n",
                static_cast<double>(correct) / static_cast<double>(test.size()));
    std::printf("held-out magnitude MAE: %.3f mm, %.3f deg\n", mae_x / test.size(),
                mae_theta / test.size());
  }
  std::cout << "weights: " << args.out << '\n';

  std::map<std::string, std::string> manifest_config;
  manifest_config["dataset"] = args.dataset;
  char lambda_text[40];
  std::snprintf(lambda_text, sizeof lambda_text, "%.17g", args.reg_lambda);
  manifest_config["reg_lambda"] = lambda_text;
  manifest_config["split"] = "every fifth sample held out";
  write_manifest(args.out + ".manifest.json", manifest_config, 0, {args.out},
                 seconds_since(start));
}

void cmd_experiment(const ExperimentArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig run = load_run_config(args.common);
  if (run.estimator == EstimatorKind::kLinear) {
    if (run.weights_path.empty()) {
      throw std::runtime_error("linear estimator requires --weights or a weights key");
    }
    if (!fs::exists(run.weights_path)) {
      throw std::runtime_error("weights file does not exist: " + run.weights_path);
    }
  }
  fs::create_directories(args.out_dir);
  const fs::path out_dir(args.out_dir);

  std::vector<ExperimentSummary> summaries;
  std::vector<std::string> outputs;
  for (const auto& entry : run.shapes) {
    const ExperimentConfig cfg = make_experiment_config(run, entry);
    summaries.push_back(run_experiment(cfg));
    const fs::path jsonl = out_dir / ("episodes_" + entry.name + ".jsonl");
    auto out = open_out(jsonl.string());
    write_episode_jsonl(summaries.back(), out);
    outputs.push_back(jsonl.string());
  }

  const fs::path summary_path = out_dir / "summary.csv";
  {
    auto out = open_out(summary_path.string());
    write_summary_csv(summaries, out);
  }
  const fs::path scatter_path = out_dir / "scatter.csv";
  {
    auto out = open_out(scatter_path.string());
    write_scatter_csv(summaries, out);
  }
  outputs.insert(outputs.begin(), {summary_path.string(), scatter_path.string()});

  std::vector<SummaryRow> rows;
  for (const auto& s : summaries) rows.push_back(summary_row(s));
  write_report_table(rows, std::cout);

  write_manifest((out_dir / "manifest.json").string(), config_snapshot(run), run.seed, outputs,
                 seconds_since(start));
}

void cmd_report(const ReportArgs& args) {
  std::vector<SummaryRow> rows;
  for (const auto& dir : args.run_dirs) {
    fs::path base(dir);
    std::string run_id = base.filename().string();
    if (run_id.empty()) run_id = base.parent_path().filename().string();
    if (run_id.empty()) run_id = dir;
    const auto file_rows = read_summary_csv((base / "summary.csv").string(), run_id);
    rows.insert(rows.end(), file_rows.begin(), file_rows.end());
  }
  write_report_table(rows, std::cout);
  if (!args.out.empty()) {
    ensure_parent_dir(args.out);
    auto out = open_out(args.out);
    write_report_table(rows, out);
  }
}

void add_common_options(CLI::App* cmd, Overrides& o, bool with_episodes) {
  cmd->add_option("--config", o.config_path, "Run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed override");
  cmd->add_option("--threads", o.threads, "Worker thread count override")
      ->envname("TACTILE_PACK_THREADS")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--estimator", o.estimator, "Estimator override")
      ->check(CLI::IsMember({"oracle", "noisy", "linear"}));
  cmd->add_option("--weights", o.weights, "Weights file override (linear estimator)");
  if (with_episodes) {
    cmd->add_option("--episodes", o.episodes, "Episode count override")
        ->check(CLI::NonNegativeNumber);
  }
  cmd->add_option("--shape", o.shape, "Restrict the run to one configured shape");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile gap-packing toolkit: datasets, estimator fitting, experiments, reports"};
  app.set_version_flag("--version", std::string("tactile-pack ") + kVersion);
  app.require_subcommand(1);

  DatagenArgs datagen;
  auto* datagen_cmd =
      app.add_subcommand("datagen", "Collect a blocked-contact feature dataset");
  add_common_options(datagen_cmd, datagen.common, false);
  datagen_cmd->add_option("--out", datagen.out, "Output dataset file")->required();
  datagen_cmd->add_option("--dump-markers", datagen.dump_markers,
                          "Dump raw marker CSV/PGM for the first N samples per shape")
      ->check(CLI::NonNegativeNumber);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the linear estimator on a dataset");
  fit_cmd->add_option("--dataset", fit.dataset, "Input dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit.out, "Output weights file")->required();
  fit_cmd->add_option("--lambda", fit.reg_lambda, "Ridge regularisation strength")
      ->check(CLI::NonNegativeNumber);

  ExperimentArgs experiment;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Run probe-and-correct insertion episodes");
  add_common_options(experiment_cmd, experiment.common, true);
  experiment_cmd->add_option("--out", experiment.out_dir, "Output directory")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Merge run summaries into one table");
  report_cmd->add_option("run_dirs", report.run_dirs, "Run directories holding summary.csv")
      ->required()
      ->expected(-1);
  report_cmd->add_option("--out", report.out, "Also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*datagen_cmd) cmd_datagen(datagen);
    if (*fit_cmd) cmd_fit(fit);
    if (*experiment_cmd) cmd_experiment(experiment);
    if (*report_cmd) cmd_report(report);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

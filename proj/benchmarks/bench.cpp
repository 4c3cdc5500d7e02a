// Microbenchmarks for the hot paths: footprint fit tests, full tactile
// renders, whole probe-and-correct episodes, and a small estimator fit.
// Run via build/benchmarks/tactile_pack_bench; pass --benchmark_filter=...
// to narrow the set.

#include <benchmark/benchmark.h>

#include <vector>

#include "tactile_pack/config.hpp"
#include "tactile_pack/contact.hpp"
#include "tactile_pack/estimation.hpp"
#include "tactile_pack/geometry.hpp"
#include "tactile_pack/harness.hpp"
#include "tactile_pack/rng.hpp"
#include "tactile_pack/tactile.hpp"

namespace {

using namespace tactile_pack;

ExperimentConfig reference_config() {
  ExperimentConfig cfg;
  cfg.shape_name = "rect";
  cfg.shape = ShapeSpec::rectangle(51.0, 80.0);
  cfg.env.gap_width = 56.0;
  cfg.error_range_x = 15.3;
  cfg.error_range_theta = 15.0;
  cfg.seed = 42;
  return cfg;
}

void BM_FitsGap(benchmark::State& state) {
  const CrossSection section = make_cross_section(ShapeSpec::ellipse(51.0, 105.0));
  GapEnvironment env;
  env.gap_width = 56.0;
  Rng rng(99);
  std::vector<ErrorState> errors(256);
  for (auto& e : errors) e = {rng.uniform(-15.3, 15.3), rng.uniform(-15.0, 15.0)};
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fits_gap(section, errors[i], env));
    i = (i + 1) % errors.size();
  }
}
BENCHMARK(BM_FitsGap);

void BM_RenderSequence(benchmark::State& state) {
  const CrossSection rect = make_cross_section(ShapeSpec::rectangle(51.0, 80.0));
  GapEnvironment env;
  env.gap_width = 56.0;
  const ContactEvent event = descend(rect, {9.0, 8.0}, env);
  const ContactParams params;
  const Twist twist = pivot_twist(event, params);
  const TwistDecomposition decomp = decompose_twist(twist, event);
  const SensorLayout layout;
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_sequence(decomp, twist, layout, 0.05, seed++));
  }
}
BENCHMARK(BM_RenderSequence);

void BM_EpisodeOracle(benchmark::State& state) {
  const ExperimentConfig cfg = reference_config();
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  uint64_t episode = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_episode(cfg, section, {14.0, 0.0}, mix_seed(cfg.seed, episode++)));
  }
}
BENCHMARK(BM_EpisodeOracle);

void BM_EpisodeNoisy(benchmark::State& state) {
  ExperimentConfig cfg = reference_config();
  cfg.estimator = EstimatorKind::kNoisy;
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  uint64_t episode = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_episode(cfg, section, {14.0, 11.0}, mix_seed(cfg.seed, episode++)));
  }
}
BENCHMARK(BM_EpisodeNoisy);

void BM_FitLinear(benchmark::State& state) {
  ExperimentConfig cfg = reference_config();
  const CollectResult collected = collect_dataset(cfg, 200);
  const std::vector<TrainingSample> samples = to_training_samples(collected.dataset);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_linear_estimator(samples, 1e-3));
  }
}
BENCHMARK(BM_FitLinear);

}  // namespace

BENCHMARK_MAIN();

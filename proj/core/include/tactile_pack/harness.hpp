#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tactile_pack/config.hpp"
#include "tactile_pack/contact.hpp"
#include "tactile_pack/controller.hpp"
#include "tactile_pack/estimation.hpp"
#include "tactile_pack/geometry.hpp"
#include "tactile_pack/rng.hpp"
#include "tactile_pack/tactile.hpp"

namespace tactile_pack {

// Probe-and-correct episode loop, self-supervised dataset collection, and
// Monte Carlo experiment aggregation. Everything here is deterministic for a
// fixed (config, seed): per-episode and per-attempt streams are derived from
// the master seed by index, so results do not depend on thread count or
// iteration order.

struct TrialRecord {
  int trial = 0;  // 1-based
  ErrorState error_before;
  bool blocked = false;
  ContactSide side = ContactSide::kNone;
  DirectionClass class_true = DirectionClass::kNoError;
  DirectionClass class_est = DirectionClass::kNoError;
  ErrorEstimate estimate;
  Correction correction;
  // First tactile frame whose shear peak reaches tau_slip (0 if none). The
  // descent is depth-limited either way; this records when a safety stop
  // would have fired.
  int slip_frame = 0;
};

struct EpisodeRecord {
  int episode_id = 0;
  ErrorState initial_error;
  std::vector<TrialRecord> trials;
  bool success = false;
  // Trials used for statistics: the successful trial count, or
  // max_trials + 1 when the episode never seats.
  int trial_count = 0;
};

struct DatasetSample {
  std::vector<double> features;
  DirectionClass class_label = DirectionClass::kNoError;
  ErrorState error_label;
  std::string shape_name;
  // True when the contact was blocked with both components under their
  // dead-zone thresholds and the label fell back to the dominant
  // threshold-normalised component's sign.
  bool dominant_labeled = false;
};

struct Dataset {
  int feature_dim = 0;
  std::vector<DatasetSample> samples;
};

struct CollectResult {
  Dataset dataset;
  long attempts = 0;  // descents simulated, blocked or not
};

struct ExperimentSummary {
  std::string shape_name;
  EstimatorKind estimator = EstimatorKind::kOracle;
  int episodes = 0;
  int successes = 0;
  std::optional<double> success_rate;  // absent when episodes == 0
  std::optional<double> mean_trials;   // failures counted as max_trials + 1
  int max_trials_observed = 0;
  std::vector<EpisodeRecord> records;
};

// One parsed summary-file row; run_id is attached by the reader so merged
// reports can disambiguate colliding (shape, estimator) keys.
struct SummaryRow {
  std::string shape;
  std::string estimator;
  int episodes = 0;
  std::optional<double> success_rate;
  std::optional<double> mean_trials;
  int max_trials = 0;
  std::string run_id;
};

// Stable non-cryptographic hash used to decorrelate per-shape streams.
uint64_t shape_salt(const std::string& name);

// Uniform independent draws over the configured error ranges.
ErrorState sample_error(const ExperimentConfig& cfg, Rng& rng);

// Initial error for episode `episode_id`: the four range corners first when
// extreme_corners is set, sampled from the episode's own stream otherwise.
ErrorState initial_error_for_episode(const ExperimentConfig& cfg, int episode_id,
                                     uint64_t episode_seed);

// One descend/estimate/correct loop from a given initial error. `linear`
// must be non-null when cfg.estimator is kLinear and is ignored otherwise.
EpisodeRecord run_episode(const ExperimentConfig& cfg, const CrossSection& section,
                          const ErrorState& initial_error, uint64_t episode_seed,
                          const LinearEstimator* linear = nullptr);

// Called for every kept (pre-balancing) sample with its rendered sequence,
// e.g. to dump raw marker fields. Balancing duplicates are not reported.
using SampleObserver =
    std::function<void(const TactileSequence& seq, const DatasetSample& sample, int index)>;

// Samples errors and keeps blocked contacts until samples_per_shape are
// collected, then appends duplicates of every pure-rotation-class sample
// re-rendered with fresh observation noise. Throws std::runtime_error when
// the attempt budget is exhausted first.
CollectResult collect_dataset(const ExperimentConfig& cfg, int samples_per_shape,
                              const SampleObserver& observer = {});

// cfg.episodes independent episodes with per-episode seeds; thread-parallel
// per cfg.threads with order-independent aggregation. Loads weights from
// cfg.weights_path when the linear estimator is configured.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const LinearEstimator* linear);

std::vector<TrainingSample> to_training_samples(const Dataset& dataset);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

SummaryRow summary_row(const ExperimentSummary& summary);
void write_summary_csv(const std::vector<ExperimentSummary>& summaries, std::ostream& out);
std::vector<SummaryRow> read_summary_csv(const std::string& path, const std::string& run_id);
void write_scatter_csv(const std::vector<ExperimentSummary>& summaries, std::ostream& out);
void write_episode_jsonl(const ExperimentSummary& summary, std::ostream& out);

// Fixed-width text table merged by (shape, estimator); colliding keys keep
// both rows, disambiguated by run id.
void write_report_table(const std::vector<SummaryRow>& rows, std::ostream& out);

// JSON run manifest (config snapshot, seed, tool version, outputs, duration,
// timestamp), written atomically via a temporary file. Timestamps live only
// here so the data files stay byte-reproducible.
void write_manifest(const std::string& path, const std::map<std::string, std::string>& config,
                    uint64_t seed, const std::vector<std::string>& outputs,
                    double duration_seconds);

}  // namespace tactile_pack

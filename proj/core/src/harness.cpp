#include "tactile_pack/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "tactile_pack/version.hpp"

namespace tactile_pack {

namespace {

// Stream salts keeping error sampling, experiments, dataset collection and
// balancing duplicates on disjoint random streams for one master seed.
constexpr uint64_t kErrorSalt = 0x0e5eedba11cafeULL;
constexpr uint64_t kExperimentSalt = 0x00c0deba5eba11ULL;
constexpr uint64_t kDatasetSalt = 0x00da7a5e55a17aULL;
constexpr uint64_t kDuplicateSalt = 0x002b1e55ed7a9eULL;

std::string fmt_double(double v) {
  if (v == 0.0) v = 0.0;  // normalise -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

}  // namespace

uint64_t shape_salt(const std::string& name) {
  // FNV-1a, 64 bit.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

ErrorState sample_error(const ExperimentConfig& cfg, Rng& rng) {
  ErrorState error;
  error.dx = rng.uniform(-cfg.error_range_x, cfg.error_range_x);
  error.dtheta = rng.uniform(-cfg.error_range_theta, cfg.error_range_theta);
  return error;
}

ErrorState initial_error_for_episode(const ExperimentConfig& cfg, int episode_id,
                                     uint64_t episode_seed) {
  if (cfg.extreme_corners && episode_id < 4) {
    const double sx = (episode_id & 1) ? -1.0 : 1.0;
    const double st = (episode_id & 2) ? -1.0 : 1.0;
    return {sx * cfg.error_range_x, st * cfg.error_range_theta};
  }
  Rng rng(mix_seed(episode_seed, kErrorSalt));
  return sample_error(cfg, rng);
}

EpisodeRecord run_episode(const ExperimentConfig& cfg, const CrossSection& section,
                          const ErrorState& initial_error, uint64_t episode_seed,
                          const LinearEstimator* linear) {
  if (cfg.estimator == EstimatorKind::kLinear && linear == nullptr) {
    throw std::logic_error("run_episode: linear estimator selected but no weights supplied");
  }
  EpisodeRecord record;
  record.initial_error = initial_error;
  ErrorState error = initial_error;
  for (int trial = 1; trial <= cfg.max_trials; ++trial) {
    TrialRecord tr;
    tr.trial = trial;
    tr.error_before = error;
    tr.class_true = classify_direction_truth(error, cfg.thresholds);
    const ContactEvent event = descend(section, error, cfg.env);
    if (!event.blocked) {
      record.trials.push_back(tr);
      record.success = true;
      record.trial_count = trial;
      return record;
    }
    tr.blocked = true;
    tr.side = event.side;
    const uint64_t trial_seed = mix_seed(episode_seed, static_cast<uint64_t>(trial));
    const Twist twist = pivot_twist(event, cfg.contact);
    const TwistDecomposition decomp = decompose_twist(twist, event);
    const TactileSequence seq = render_sequence(decomp, twist, cfg.tactile.layout,
                                                cfg.tactile.noise_sigma, trial_seed);
    tr.slip_frame = slip_trigger_frame(seq, cfg.tactile.tau_slip);
    switch (cfg.estimator) {
      case EstimatorKind::kOracle:
        std::tie(tr.class_est, tr.estimate) = oracle_estimate(error, cfg.thresholds);
        break;
      case EstimatorKind::kNoisy:
        std::tie(tr.class_est, tr.estimate) =
            noisy_estimate(error, cfg.noise, cfg.thresholds, trial_seed);
        break;
      case EstimatorKind::kLinear:
        std::tie(tr.class_est, tr.estimate) = predict(*linear, extract_features(seq));
        break;
    }
    tr.correction = correction(class_to_signs(tr.class_est), tr.estimate, trial, cfg.controller);
    record.trials.push_back(tr);
    error = apply(error, tr.correction);
  }
  record.success = false;
  record.trial_count = cfg.max_trials + 1;
  return record;
}

CollectResult collect_dataset(const ExperimentConfig& cfg, int samples_per_shape,
                              const SampleObserver& observer) {
  if (samples_per_shape < 1) {
    throw std::invalid_argument("collect_dataset: samples_per_shape must be at least 1");
  }
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  const uint64_t base = mix_seed(mix_seed(cfg.seed, kDatasetSalt), shape_salt(cfg.shape_name));
  CollectResult result;
  result.dataset.feature_dim = feature_dimension(cfg.tactile.layout);
  std::vector<DatasetSample> extras;
  const long attempt_budget = 1000 + 100L * samples_per_shape;
  int kept = 0;
  for (long attempt = 0; kept < samples_per_shape; ++attempt) {
    if (attempt >= attempt_budget) {
      throw std::runtime_error("collect_dataset: shape '" + cfg.shape_name + "' produced " +
                               std::to_string(kept) + " blocked contacts in " +
                               std::to_string(attempt) + " attempts, needed " +
                               std::to_string(samples_per_shape));
    }
    ++result.attempts;
    const uint64_t attempt_seed = mix_seed(base, static_cast<uint64_t>(attempt));
    Rng rng(mix_seed(attempt_seed, kErrorSalt));
    const ErrorState error = sample_error(cfg, rng);
    const ContactEvent event = descend(section, error, cfg.env);
    if (!event.blocked) continue;

    DirectionClass label = classify_direction_truth(error, cfg.thresholds);
    bool dominant = false;
    if (label == DirectionClass::kNoError) {
      // Blocked below both dead zones: fall back to the dominant
      // threshold-normalised component. A perfectly centred jam carries no
      // direction signal at all and is skipped.
      const double nx = std::abs(error.dx) / cfg.thresholds.t_x;
      const double nt = std::abs(error.dtheta) / cfg.thresholds.t_theta;
      if (nx == 0.0 && nt == 0.0) continue;
      dominant = true;
      if (nx >= nt) {
        label = error.dx < 0.0 ? DirectionClass::kNegX : DirectionClass::kPosX;
      } else {
        label = error.dtheta < 0.0 ? DirectionClass::kNegTheta : DirectionClass::kPosTheta;
      }
    }

    const Twist twist = pivot_twist(event, cfg.contact);
    const TwistDecomposition decomp = decompose_twist(twist, event);
    const TactileSequence seq = render_sequence(decomp, twist, cfg.tactile.layout,
                                                cfg.tactile.noise_sigma, attempt_seed);
    DatasetSample sample;
    sample.features = extract_features(seq);
    sample.class_label = label;
    sample.error_label = error;
    sample.shape_name = cfg.shape_name;
    sample.dominant_labeled = dominant;
    if (observer) observer(seq, sample, kept);
    if (label == DirectionClass::kNegTheta || label == DirectionClass::kPosTheta) {
      const TactileSequence dup_seq =
          render_sequence(decomp, twist, cfg.tactile.layout, cfg.tactile.noise_sigma,
                          mix_seed(attempt_seed, kDuplicateSalt));
      DatasetSample dup = sample;
      dup.features = extract_features(dup_seq);
      extras.push_back(std::move(dup));
    }
    result.dataset.samples.push_back(std::move(sample));
    ++kept;
  }
  // Pure-rotation classes are doubled after collection, re-rendered with
  // fresh observation noise.
  for (auto& dup : extras) result.dataset.samples.push_back(std::move(dup));
  return result;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, nullptr);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const LinearEstimator* linear) {
  cfg.validate();
  LinearEstimator loaded;
  if (cfg.estimator == EstimatorKind::kLinear && linear == nullptr) {
    if (cfg.weights_path.empty()) {
      throw std::runtime_error("linear estimator requires a weights file (none configured)");
    }
    loaded = load_estimator(cfg.weights_path);
    linear = &loaded;
  }
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  const uint64_t base = mix_seed(mix_seed(cfg.seed, kExperimentSalt), shape_salt(cfg.shape_name));

  ExperimentSummary summary;
  summary.shape_name = cfg.shape_name;
  summary.estimator = cfg.estimator;
  summary.episodes = cfg.episodes;
  summary.records.resize(cfg.episodes);
  if (cfg.episodes > 0) {
    const int thread_count = std::max(1, std::min(cfg.threads, cfg.episodes));
    auto worker = [&](int first) {
      for (int e = first; e < cfg.episodes; e += thread_count) {
        const uint64_t episode_seed = mix_seed(base, static_cast<uint64_t>(e));
        const ErrorState initial = initial_error_for_episode(cfg, e, episode_seed);
        summary.records[e] = run_episode(cfg, section, initial, episode_seed, linear);
        summary.records[e].episode_id = e;
      }
    };
    if (thread_count == 1) {
      worker(0);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(thread_count);
      for (int w = 0; w < thread_count; ++w) {
        threads.emplace_back([&, w] {
          try {
            worker(w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : threads) t.join();
      for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }
  }

  long trial_sum = 0;
  for (const auto& rec : summary.records) {
    if (rec.success) ++summary.successes;
    trial_sum += rec.trial_count;
    summary.max_trials_observed = std::max(summary.max_trials_observed, rec.trial_count);
  }
  if (summary.episodes > 0) {
    summary.success_rate = static_cast<double>(summary.successes) / summary.episodes;
    summary.mean_trials = static_cast<double>(trial_sum) / summary.episodes;
  }
  return summary;
}

std::vector<TrainingSample> to_training_samples(const Dataset& dataset) {
  std::vector<TrainingSample> out;
  out.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    TrainingSample t;
    t.features = s.features;
    t.label = s.class_label;
    t.dx = s.error_label.dx;
    t.dtheta = s.error_label.dtheta;
    out.push_back(std::move(t));
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "# tactile_pack_dataset_v1\n";
  out << "feature_dim " << dataset.feature_dim << "\n";
  out << "samples " << dataset.samples.size() << "\n";
  out << "# columns: shape class dominant dx dtheta features[feature_dim]\n";
  for (const auto& s : dataset.samples) {
    if (static_cast<int>(s.features.size()) != dataset.feature_dim) {
      throw std::runtime_error("dataset sample feature length mismatch");
    }
    out << s.shape_name << ' ' << static_cast<int>(s.class_label) << ' '
        << (s.dominant_labeled ? 1 : 0) << ' ' << fmt_double(s.error_label.dx) << ' '
        << fmt_double(s.error_label.dtheta);
    for (const double f : s.features) out << ' ' << fmt_double(f);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing dataset file: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# tactile_pack_dataset_v1") {
    throw std::runtime_error("not a tactile_pack_dataset_v1 file: " + path);
  }
  Dataset dataset;
  size_t declared = 0;
  bool have_dim = false;
  bool have_count = false;
  while ((!have_dim || !have_count) && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream header(line);
    std::string key;
    header >> key;
    if (key == "feature_dim") {
      header >> dataset.feature_dim;
      have_dim = true;
    } else if (key == "samples") {
      header >> declared;
      have_count = true;
    } else {
      throw std::runtime_error("unexpected dataset header line: " + line);
    }
    if (!header) throw std::runtime_error("malformed dataset header line: " + line);
  }
  if (!have_dim || !have_count) {
    throw std::runtime_error("dataset header incomplete: " + path);
  }
  if (dataset.feature_dim <= 0) {
    throw std::runtime_error("dataset declares a non-positive feature_dim: " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    DatasetSample s;
    int cls = 0;
    int dominant = 0;
    row >> s.shape_name >> cls >> dominant >> s.error_label.dx >> s.error_label.dtheta;
    if (!row || cls < 0 || cls >= kDirectionClassCount) {
      throw std::runtime_error("malformed dataset row: " + line);
    }
    s.class_label = static_cast<DirectionClass>(cls);
    s.dominant_labeled = dominant != 0;
    s.features.resize(dataset.feature_dim);
    for (double& f : s.features) row >> f;
    if (!row) throw std::runtime_error("dataset row has too few features: " + line);
    dataset.samples.push_back(std::move(s));
  }
  if (dataset.samples.size() != declared) {
    throw std::runtime_error("dataset sample count mismatch: declared " +
                             std::to_string(declared) + ", found " +
                             std::to_string(dataset.samples.size()));
  }
  return dataset;
}

SummaryRow summary_row(const ExperimentSummary& summary) {
  SummaryRow row;
  row.shape = summary.shape_name;
  row.estimator = estimator_kind_name(summary.estimator);
  row.episodes = summary.episodes;
  row.success_rate = summary.success_rate;
  row.mean_trials = summary.mean_trials;
  row.max_trials = summary.max_trials_observed;
  return row;
}

void write_summary_csv(const std::vector<ExperimentSummary>& summaries, std::ostream& out) {
  out << "# tactile_pack_summary_v1\n";
  out << "shape,estimator,episodes,success_rate,mean_trials,max_trials\n";
  for (const auto& s : summaries) {
    out << s.shape_name << ',' << estimator_kind_name(s.estimator) << ',' << s.episodes << ','
        << (s.success_rate ? fmt_double(*s.success_rate) : "") << ','
        << (s.mean_trials ? fmt_double(*s.mean_trials) : "") << ',' << s.max_trials_observed
        << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(const std::string& path, const std::string& run_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open summary file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# tactile_pack_summary_v1") {
    throw std::runtime_error("not a tactile_pack_summary_v1 file: " + path);
  }
  if (!std::getline(in, line) ||
      line != "shape,estimator,episodes,success_rate,mean_trials,max_trials") {
    throw std::runtime_error("unexpected summary column header in: " + path);
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream split(line);
    while (std::getline(split, cell, ',')) cells.push_back(cell);
    // A trailing empty cell is dropped by getline; pad to column count.
    while (cells.size() < 6) cells.push_back("");
    if (cells.size() != 6) throw std::runtime_error("malformed summary row: " + line);
    SummaryRow row;
    row.shape = cells[0];
    row.estimator = cells[1];
    row.episodes = std::stoi(cells[2]);
    if (!cells[3].empty()) row.success_rate = std::stod(cells[3]);
    if (!cells[4].empty()) row.mean_trials = std::stod(cells[4]);
    row.max_trials = std::stoi(cells[5]);
    row.run_id = run_id;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_scatter_csv(const std::vector<ExperimentSummary>& summaries, std::ostream& out) {
  out << "# tactile_pack_scatter_v1\n";
  out << "shape,estimator,dx0,dtheta0,trials,success\n";
  for (const auto& s : summaries) {
    for (const auto& rec : s.records) {
      out << s.shape_name << ',' << estimator_kind_name(s.estimator) << ','
          << fmt_double(rec.initial_error.dx) << ',' << fmt_double(rec.initial_error.dtheta)
          << ',' << rec.trial_count << ',' << (rec.success ? 1 : 0) << '\n';
    }
  }
}

void write_episode_jsonl(const ExperimentSummary& summary, std::ostream& out) {
  for (const auto& rec : summary.records) {
    for (const auto& tr : rec.trials) {
      nlohmann::ordered_json obj;
      obj["episode"] = rec.episode_id;
      obj["trial"] = tr.trial;
      obj["dx"] = clean_zero(tr.error_before.dx);
      obj["dtheta"] = clean_zero(tr.error_before.dtheta);
      obj["blocked"] = tr.blocked;
      obj["side"] = contact_side_name(tr.side);
      obj["class_true"] = static_cast<int>(tr.class_true);
      obj["class_est"] = static_cast<int>(tr.class_est);
      obj["dxe"] = clean_zero(tr.estimate.dx_e);
      obj["dthetae"] = clean_zero(tr.estimate.dtheta_e);
      obj["cx"] = clean_zero(tr.correction.cx);
      obj["ctheta"] = clean_zero(tr.correction.ctheta);
      out << obj.dump() << '\n';
    }
  }
}

void write_report_table(const std::vector<SummaryRow>& rows, std::ostream& out) {
  std::map<std::pair<std::string, std::string>, int> key_count;
  for (const auto& row : rows) ++key_count[{row.shape, row.estimator}];

  std::vector<std::array<std::string, 6>> cells;
  int dup_ordinal = 0;
  for (const auto& row : rows) {
    std::string shape = row.shape;
    if (key_count[{row.shape, row.estimator}] > 1) {
      shape += " [" + (row.run_id.empty() ? "#" + std::to_string(++dup_ordinal) : row.run_id) +
               "]";
    }
    char success[32] = "-";
    char mean[32] = "-";
    if (row.success_rate) std::snprintf(success, sizeof success, "%.1f%%", *row.success_rate * 100.0);
    if (row.mean_trials) std::snprintf(mean, sizeof mean, "%.2f", *row.mean_trials);
    cells.push_back({shape, row.estimator, std::to_string(row.episodes), success, mean,
                     std::to_string(row.max_trials)});
  }

  const std::array<std::string, 6> header = {"shape", "estimator", "episodes",
                                             "success", "mean",      "max"};
  std::array<size_t, 6> width{};
  for (size_t c = 0; c < 6; ++c) width[c] = header[c].size();
  for (const auto& row : cells) {
    for (size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto emit = [&](const std::array<std::string, 6>& row) {
    for (size_t c = 0; c < 6; ++c) {
      // Left-align names, right-align numbers.
      if (c < 2) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
      out << (c + 1 < 6 ? "  " : "");
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : cells) emit(row);
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& config,
                    uint64_t seed, const std::vector<std::string>& outputs,
                    double duration_seconds) {
  nlohmann::ordered_json doc;
  doc["tool"] = "tactile-pack";
  doc["version"] = kVersion;
  char stamp[32] = "";
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  if (gmtime_r(&now, &utc) != nullptr) {
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  }
  doc["created_utc"] = stamp;
  doc["seed"] = seed;
  doc["duration_seconds"] = duration_seconds;
  doc["config"] = config;
  doc["outputs"] = outputs;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + tmp);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing manifest: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move manifest into place: " + path);
  }
}

}  // namespace tactile_pack

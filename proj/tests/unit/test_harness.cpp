#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tactile_pack/config.hpp"
#include "tactile_pack/harness.hpp"
#include "tactile_pack/rng.hpp"

using namespace tactile_pack;

namespace {

ExperimentConfig rect_config() {
  ExperimentConfig cfg;
  cfg.shape_name = "rect";
  cfg.shape = ShapeSpec::rectangle(51.0, 80.0);
  cfg.env.gap_width = 56.0;
  cfg.error_range_x = 15.3;
  cfg.error_range_theta = 15.0;
  cfg.episodes = 50;
  cfg.seed = 42;
  return cfg;
}

ExperimentConfig circle_config() {
  ExperimentConfig cfg = rect_config();
  cfg.shape_name = "circle";
  cfg.shape = ShapeSpec::circle(25.5);
  return cfg;
}

bool records_equal(const EpisodeRecord& a, const EpisodeRecord& b) {
  if (a.episode_id != b.episode_id || a.success != b.success ||
      a.trial_count != b.trial_count || a.trials.size() != b.trials.size()) {
    return false;
  }
  if (a.initial_error.dx != b.initial_error.dx ||
      a.initial_error.dtheta != b.initial_error.dtheta) {
    return false;
  }
  for (size_t i = 0; i < a.trials.size(); ++i) {
    const TrialRecord& ta = a.trials[i];
    const TrialRecord& tb = b.trials[i];
    if (ta.trial != tb.trial || ta.blocked != tb.blocked || ta.side != tb.side ||
        ta.class_true != tb.class_true || ta.class_est != tb.class_est ||
        ta.estimate.dx_e != tb.estimate.dx_e || ta.estimate.dtheta_e != tb.estimate.dtheta_e ||
        ta.correction.cx != tb.correction.cx || ta.correction.ctheta != tb.correction.ctheta ||
        ta.slip_frame != tb.slip_frame) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("shape salts separate named streams deterministically") {
  CHECK(shape_salt("rect") == shape_salt("rect"));
  CHECK(shape_salt("rect") != shape_salt("circle"));
  CHECK(shape_salt("a") != shape_salt("b"));
}

TEST_CASE("error sampling stays inside the configured box") {
  const ExperimentConfig cfg = rect_config();
  Rng rng(99);
  double sum_dx = 0.0;
  double sum_dtheta = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const ErrorState e = sample_error(cfg, rng);
    CHECK(std::abs(e.dx) <= 15.3);
    CHECK(std::abs(e.dtheta) <= 15.0);
    sum_dx += e.dx;
    sum_dtheta += e.dtheta;
  }
  CHECK(std::abs(sum_dx / n) < 0.153);      // within 0.5% of the range width
  CHECK(std::abs(sum_dtheta / n) < 0.15);

  ExperimentConfig pinned = cfg;
  pinned.error_range_x = 0.0;
  pinned.error_range_theta = 0.0;
  Rng rng2(1);
  const ErrorState z = sample_error(pinned, rng2);
  CHECK(z.dx == 0.0);
  CHECK(z.dtheta == 0.0);
}

TEST_CASE("extreme corners lead the episode order when enabled") {
  ExperimentConfig cfg = rect_config();
  cfg.extreme_corners = true;
  const double rx = cfg.error_range_x;
  const double rt = cfg.error_range_theta;

  const ErrorState c0 = initial_error_for_episode(cfg, 0, mix_seed(1, 0));
  const ErrorState c1 = initial_error_for_episode(cfg, 1, mix_seed(1, 1));
  const ErrorState c2 = initial_error_for_episode(cfg, 2, mix_seed(1, 2));
  const ErrorState c3 = initial_error_for_episode(cfg, 3, mix_seed(1, 3));
  CHECK(c0.dx == rx);
  CHECK(c0.dtheta == rt);
  CHECK(c1.dx == -rx);
  CHECK(c1.dtheta == rt);
  CHECK(c2.dx == rx);
  CHECK(c2.dtheta == -rt);
  CHECK(c3.dx == -rx);
  CHECK(c3.dtheta == -rt);

  const ErrorState later = initial_error_for_episode(cfg, 4, mix_seed(1, 4));
  CHECK(std::abs(later.dx) <= rx);
  CHECK(std::abs(later.dtheta) <= rt);

  cfg.extreme_corners = false;
  const ErrorState sampled = initial_error_for_episode(cfg, 0, mix_seed(1, 0));
  CHECK(std::abs(sampled.dx) <= rx);
  // Hitting the exact corner by chance has probability zero.
  CHECK(sampled.dx != rx);
}

TEST_CASE("an oracle episode walks a pure translation error home") {
  const ExperimentConfig cfg = rect_config();
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  const EpisodeRecord rec = run_episode(cfg, section, {14.0, 0.0}, mix_seed(42, 0));

  CHECK(rec.success);
  CHECK(rec.trial_count == 3);
  REQUIRE(rec.trials.size() == 3);

  const TrialRecord& t1 = rec.trials[0];
  CHECK(t1.trial == 1);
  CHECK(t1.blocked);
  CHECK(t1.side == ContactSide::kRight);
  CHECK(t1.class_true == DirectionClass::kPosX);
  CHECK(t1.class_est == DirectionClass::kPosX);
  CHECK(t1.estimate.dx_e == 14.0);
  CHECK(t1.correction.cx == doctest::Approx(-9.8).epsilon(1e-12));
  CHECK(t1.correction.ctheta == 0.0);
  CHECK(t1.slip_frame == 2);  // strong pivot crosses the default threshold early

  const TrialRecord& t2 = rec.trials[1];
  CHECK(t2.blocked);
  CHECK(t2.error_before.dx == doctest::Approx(4.2).epsilon(1e-9));
  CHECK(t2.correction.cx == doctest::Approx(-2.94).epsilon(1e-9));

  const TrialRecord& t3 = rec.trials[2];
  CHECK_FALSE(t3.blocked);
  CHECK(t3.side == ContactSide::kNone);
  CHECK(t3.error_before.dx == doctest::Approx(1.26).epsilon(1e-9));
  CHECK(t3.correction.cx == 0.0);
  CHECK(t3.slip_frame == 0);
}

TEST_CASE("feasible starts succeed on the first trial") {
  const ExperimentConfig cfg = rect_config();
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  const EpisodeRecord rec = run_episode(cfg, section, {0.4, 1.0}, mix_seed(42, 1));
  CHECK(rec.success);
  CHECK(rec.trial_count == 1);
  REQUIRE(rec.trials.size() == 1);
  CHECK_FALSE(rec.trials[0].blocked);
}

TEST_CASE("only the final trial of a successful episode is unblocked") {
  const ExperimentConfig cfg = rect_config();
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  for (int i = 0; i < 200; ++i) {
    Rng sampler(mix_seed(555, i));
    const ErrorState initial = sample_error(cfg, sampler);
    const EpisodeRecord rec = run_episode(cfg, section, initial, mix_seed(777, i));
    for (size_t t = 0; t < rec.trials.size(); ++t) {
      const bool is_last = t + 1 == rec.trials.size();
      if (rec.success && is_last) {
        CHECK_FALSE(rec.trials[t].blocked);
      } else {
        CHECK(rec.trials[t].blocked);
      }
      CHECK(rec.trials[t].trial == static_cast<int>(t) + 1);
    }
    CHECK(rec.trial_count <= cfg.max_trials + 1);
  }
}

TEST_CASE("a gap narrower than the object never seats and exhausts the trials") {
  ExperimentConfig cfg = rect_config();
  cfg.env.gap_width = 50.0;  // hopeless by construction
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  const EpisodeRecord rec = run_episode(cfg, section, {0.0, 0.0}, mix_seed(42, 0));
  CHECK_FALSE(rec.success);
  CHECK(rec.trial_count == cfg.max_trials + 1);
  CHECK(static_cast<int>(rec.trials.size()) == cfg.max_trials);
  for (const auto& t : rec.trials) CHECK(t.blocked);
}

TEST_CASE("a perfect noisy model reproduces the oracle episode") {
  const ExperimentConfig oracle_cfg = rect_config();
  ExperimentConfig noisy_cfg = rect_config();
  noisy_cfg.estimator = EstimatorKind::kNoisy;
  noisy_cfg.noise.direction_accuracy = 1.0;
  noisy_cfg.noise.magnitude_half_width_x = 0.0;
  noisy_cfg.noise.magnitude_half_width_theta = 0.0;

  const CrossSection section = make_cross_section(oracle_cfg.shape, oracle_cfg.vertex_count);
  for (int i = 0; i < 50; ++i) {
    Rng sampler(mix_seed(31, i));
    const ErrorState initial = sample_error(oracle_cfg, sampler);
    EpisodeRecord a = run_episode(oracle_cfg, section, initial, mix_seed(9, i));
    EpisodeRecord b = run_episode(noisy_cfg, section, initial, mix_seed(9, i));
    a.episode_id = b.episode_id = i;
    CHECK(records_equal(a, b));
  }
}

TEST_CASE("the linear estimator must be supplied to a linear episode") {
  ExperimentConfig cfg = rect_config();
  cfg.estimator = EstimatorKind::kLinear;
  const CrossSection section = make_cross_section(cfg.shape, cfg.vertex_count);
  CHECK_THROWS_AS(run_episode(cfg, section, {10.0, 0.0}, 1), std::logic_error);
}

TEST_CASE("dataset collection keeps blocked contacts with consistent labels") {
  ExperimentConfig cfg = rect_config();
  cfg.seed = 7;
  const CollectResult result = collect_dataset(cfg, 300);
  const Dataset& ds = result.dataset;

  CHECK(ds.feature_dim == 126);
  CHECK(static_cast<int>(ds.samples.size()) >= 300);
  CHECK(result.attempts >= 300);

  const ClassifierThresholds thresholds;
  int dominant = 0;
  std::set<int> classes_seen;
  for (const auto& s : ds.samples) {
    CHECK(static_cast<int>(s.features.size()) == ds.feature_dim);
    CHECK(s.shape_name == "rect");
    classes_seen.insert(static_cast<int>(s.class_label));
    if (s.dominant_labeled) {
      ++dominant;
      // Sub-threshold contact: the label is a pure sign class.
      const SignPair signs = class_to_signs(s.class_label);
      CHECK((signs.sx == 0) != (signs.stheta == 0));
      CHECK(std::abs(s.error_label.dx) <= thresholds.t_x);
      CHECK(std::abs(s.error_label.dtheta) <= thresholds.t_theta);
    } else {
      CHECK(classify_direction_truth(s.error_label, thresholds) == s.class_label);
    }
    // Blocked contacts are never labeled "no error".
    CHECK(s.class_label != DirectionClass::kNoError);
  }
  CHECK(classes_seen.size() >= 6);  // the rectangle populates most regions

  SUBCASE("pure-rotation classes are duplicated at the tail") {
    int originals_78 = 0;
    for (int i = 0; i < 300; ++i) {
      const auto c = ds.samples[i].class_label;
      if (c == DirectionClass::kNegTheta || c == DirectionClass::kPosTheta) ++originals_78;
    }
    CHECK(static_cast<int>(ds.samples.size()) == 300 + originals_78);
    CHECK(originals_78 > 0);  // the rectangle jams on pure rotation
    for (size_t i = 300; i < ds.samples.size(); ++i) {
      const auto c = ds.samples[i].class_label;
      CHECK((c == DirectionClass::kNegTheta || c == DirectionClass::kPosTheta));
    }
  }

  SUBCASE("collection is deterministic") {
    const CollectResult again = collect_dataset(cfg, 300);
    REQUIRE(again.dataset.samples.size() == ds.samples.size());
    CHECK(again.attempts == result.attempts);
    for (size_t i = 0; i < ds.samples.size(); ++i) {
      CHECK(again.dataset.samples[i].features == ds.samples[i].features);
      CHECK(again.dataset.samples[i].class_label == ds.samples[i].class_label);
    }
  }
}

TEST_CASE("noisy duplicates re-render with fresh observation noise") {
  ExperimentConfig cfg = rect_config();
  cfg.seed = 11;
  cfg.tactile.noise_sigma = 0.3;
  const CollectResult result = collect_dataset(cfg, 200);
  const Dataset& ds = result.dataset;
  REQUIRE(static_cast<int>(ds.samples.size()) > 200);

  // Each tail duplicate repeats an original's error but not its noise draw.
  size_t tail = 200;
  for (size_t i = 0; i < 200 && tail < ds.samples.size(); ++i) {
    const auto c = ds.samples[i].class_label;
    if (c != DirectionClass::kNegTheta && c != DirectionClass::kPosTheta) continue;
    const DatasetSample& orig = ds.samples[i];
    const DatasetSample& dup = ds.samples[tail++];
    CHECK(dup.class_label == orig.class_label);
    CHECK(dup.error_label.dx == orig.error_label.dx);
    CHECK(dup.error_label.dtheta == orig.error_label.dtheta);
    CHECK(dup.features != orig.features);
  }
  CHECK(tail == ds.samples.size());
}

TEST_CASE("round shapes never produce pure-rotation samples") {
  ExperimentConfig hex_cfg = rect_config();
  hex_cfg.shape_name = "hexagon";
  hex_cfg.shape = ShapeSpec::hexagon(25.5);
  for (ExperimentConfig cfg : {circle_config(), hex_cfg}) {
    cfg.seed = 3;
    const CollectResult result = collect_dataset(cfg, 400);
    for (const auto& s : result.dataset.samples) {
      CHECK(s.class_label != DirectionClass::kNegTheta);
      CHECK(s.class_label != DirectionClass::kPosTheta);
    }
  }
}

TEST_CASE("the sample observer sees originals only") {
  ExperimentConfig cfg = rect_config();
  cfg.seed = 13;
  int calls = 0;
  int last_index = -1;
  const CollectResult result =
      collect_dataset(cfg, 150, [&](const TactileSequence&, const DatasetSample& sample, int i) {
        CHECK(i == last_index + 1);
        last_index = i;
        CHECK_FALSE(sample.shape_name.empty());
        ++calls;
      });
  CHECK(calls == 150);
  CHECK(static_cast<int>(result.dataset.samples.size()) >= 150);
}

TEST_CASE("an unreachable shape exhausts the attempt budget") {
  ExperimentConfig cfg = rect_config();
  cfg.shape = ShapeSpec::circle(2.5);  // 5 mm puck in a 56 mm gap
  cfg.shape_name = "puck";
  cfg.error_range_x = 1.5;
  CHECK_THROWS_AS(collect_dataset(cfg, 1), std::runtime_error);
}

TEST_CASE("datasets convert to training samples field by field") {
  ExperimentConfig cfg = rect_config();
  cfg.seed = 17;
  const Dataset ds = collect_dataset(cfg, 50).dataset;
  const std::vector<TrainingSample> training = to_training_samples(ds);
  REQUIRE(training.size() == ds.samples.size());
  for (size_t i = 0; i < training.size(); ++i) {
    CHECK(training[i].features == ds.samples[i].features);
    CHECK(training[i].label == ds.samples[i].class_label);
    CHECK(training[i].dx == ds.samples[i].error_label.dx);
    CHECK(training[i].dtheta == ds.samples[i].error_label.dtheta);
  }
}

TEST_CASE("datasets survive a save and load round trip exactly") {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = rect_config();
  cfg.seed = 19;
  const Dataset ds = collect_dataset(cfg, 80).dataset;

  const fs::path dir = fs::temp_directory_path() / "tactile_pack_dataset_test";
  fs::create_directories(dir);
  const std::string path = (dir / "data.txt").string();
  save_dataset(ds, path);

  const Dataset back = load_dataset(path);
  CHECK(back.feature_dim == ds.feature_dim);
  REQUIRE(back.samples.size() == ds.samples.size());
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(back.samples[i].features == ds.samples[i].features);
    CHECK(back.samples[i].class_label == ds.samples[i].class_label);
    CHECK(back.samples[i].dominant_labeled == ds.samples[i].dominant_labeled);
    CHECK(back.samples[i].error_label.dx == ds.samples[i].error_label.dx);
    CHECK(back.samples[i].error_label.dtheta == ds.samples[i].error_label.dtheta);
    CHECK(back.samples[i].shape_name == ds.samples[i].shape_name);
  }

  SUBCASE("foreign files are rejected") {
    const std::string bad = (dir / "bad.txt").string();
    std::ofstream(bad) << "# tactile_pack_weights_v1\n";
    CHECK_THROWS_AS(load_dataset(bad), std::runtime_error);
    CHECK_THROWS_AS(load_dataset((dir / "missing.txt").string()), std::runtime_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("experiments aggregate deterministically across thread counts") {
  ExperimentConfig cfg = rect_config();
  cfg.episodes = 40;
  cfg.threads = 1;
  const ExperimentSummary serial = run_experiment(cfg);
  cfg.threads = 4;
  const ExperimentSummary parallel = run_experiment(cfg);

  CHECK(serial.episodes == 40);
  REQUIRE(serial.records.size() == 40);
  REQUIRE(parallel.records.size() == 40);
  CHECK(serial.successes == parallel.successes);
  CHECK(serial.max_trials_observed == parallel.max_trials_observed);
  REQUIRE(serial.mean_trials.has_value());
  REQUIRE(parallel.mean_trials.has_value());
  CHECK(*serial.mean_trials == *parallel.mean_trials);
  for (size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(records_equal(serial.records[i], parallel.records[i]));
  }

  const ExperimentSummary repeat = run_experiment(cfg);
  for (size_t i = 0; i < repeat.records.size(); ++i) {
    CHECK(records_equal(repeat.records[i], parallel.records[i]));
  }
}

TEST_CASE("different shapes draw different episode errors from one master seed") {
  const ExperimentSummary rect = run_experiment(rect_config());
  const ExperimentSummary circle = run_experiment(circle_config());
  REQUIRE(rect.records.size() == circle.records.size());
  bool any_different = false;
  for (size_t i = 0; i < rect.records.size(); ++i) {
    if (rect.records[i].initial_error.dx != circle.records[i].initial_error.dx) {
      any_different = true;
    }
  }
  CHECK(any_different);
}

TEST_CASE("zero-episode experiments report absent rates instead of NaN") {
  ExperimentConfig cfg = rect_config();
  cfg.episodes = 0;
  const ExperimentSummary summary = run_experiment(cfg);
  CHECK(summary.episodes == 0);
  CHECK(summary.successes == 0);
  CHECK(summary.records.empty());
  CHECK_FALSE(summary.success_rate.has_value());
  CHECK_FALSE(summary.mean_trials.has_value());
  CHECK(summary.max_trials_observed == 0);

  std::ostringstream csv;
  write_summary_csv({summary}, csv);
  CHECK(csv.str() ==
        "# tactile_pack_summary_v1\n"
        "shape,estimator,episodes,success_rate,mean_trials,max_trials\n"
        "rect,oracle,0,,,0\n");
}

TEST_CASE("estimator quality orders the mean trial counts") {
  ExperimentConfig oracle_cfg = rect_config();
  oracle_cfg.episodes = 500;
  oracle_cfg.threads = 4;

  ExperimentConfig noisy_cfg = oracle_cfg;
  noisy_cfg.estimator = EstimatorKind::kNoisy;  // default 0.744 accuracy

  ExperimentConfig blind_cfg = noisy_cfg;
  blind_cfg.noise.direction_accuracy = 0.0;

  const ExperimentSummary oracle = run_experiment(oracle_cfg);
  const ExperimentSummary noisy = run_experiment(noisy_cfg);
  const ExperimentSummary blind = run_experiment(blind_cfg);

  // Matched seeds: episode i starts from the same error in all three runs.
  for (size_t i = 0; i < oracle.records.size(); ++i) {
    CHECK(oracle.records[i].initial_error.dx == noisy.records[i].initial_error.dx);
    CHECK(noisy.records[i].initial_error.dx == blind.records[i].initial_error.dx);
  }

  REQUIRE(oracle.mean_trials.has_value());
  REQUIRE(noisy.mean_trials.has_value());
  REQUIRE(blind.mean_trials.has_value());
  CHECK(*oracle.mean_trials <= *noisy.mean_trials);
  CHECK(*noisy.mean_trials <= *blind.mean_trials);
  CHECK(oracle.successes >= noisy.successes);
}

TEST_CASE("summary csv rows round trip through the reader") {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = rect_config();
  cfg.episodes = 12;
  const ExperimentSummary summary = run_experiment(cfg);

  const fs::path dir = fs::temp_directory_path() / "tactile_pack_summary_test";
  fs::create_directories(dir);
  const std::string path = (dir / "summary.csv").string();
  {
    std::ofstream out(path, std::ios::binary);
    write_summary_csv({summary}, out);
  }

  const std::vector<SummaryRow> rows = read_summary_csv(path, "run_a");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].shape == "rect");
  CHECK(rows[0].estimator == "oracle");
  CHECK(rows[0].episodes == 12);
  CHECK(rows[0].run_id == "run_a");
  REQUIRE(rows[0].success_rate.has_value());
  CHECK(*rows[0].success_rate == *summary.success_rate);
  REQUIRE(rows[0].mean_trials.has_value());
  CHECK(*rows[0].mean_trials == *summary.mean_trials);
  CHECK(rows[0].max_trials == summary.max_trials_observed);

  SUBCASE("schema violations are rejected") {
    const std::string bad = (dir / "bad.csv").string();
    std::ofstream(bad) << "# tactile_pack_scatter_v1\nshape\n";
    CHECK_THROWS_AS(read_summary_csv(bad, "x"), std::runtime_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("scatter csv lists one row per episode") {
  ExperimentConfig cfg = rect_config();
  cfg.episodes = 9;
  const ExperimentSummary summary = run_experiment(cfg);
  std::ostringstream out;
  write_scatter_csv({summary}, out);

  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "# tactile_pack_scatter_v1");
  REQUIRE(std::getline(in, line));
  CHECK(line == "shape,estimator,dx0,dtheta0,trials,success");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("rect,oracle,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("episode logs keep a fixed field order and visible trial chain") {
  ExperimentConfig cfg = rect_config();
  cfg.episodes = 6;
  const ExperimentSummary summary = run_experiment(cfg);
  std::ostringstream out;
  write_episode_jsonl(summary, out);

  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  int episodes_seen = 0;
  int last_episode = -1;
  while (std::getline(in, line)) {
    ++lines;
    const auto obj = nlohmann::ordered_json::parse(line);
    const std::vector<std::string> expected_keys = {
        "episode", "trial", "dx", "dtheta", "blocked", "side",
        "class_true", "class_est", "dxe", "dthetae", "cx", "ctheta"};
    std::vector<std::string> keys;
    for (auto it = obj.begin(); it != obj.end(); ++it) keys.push_back(it.key());
    CHECK(keys == expected_keys);
    CHECK(obj["trial"].get<int>() >= 1);
    CHECK(obj["class_true"].get<int>() >= 0);
    CHECK(obj["class_true"].get<int>() < kDirectionClassCount);
    if (obj["episode"].get<int>() != last_episode) {
      last_episode = obj["episode"].get<int>();
      ++episodes_seen;
      CHECK(obj["trial"].get<int>() == 1);
    }
  }
  CHECK(episodes_seen == 6);
  int total_trials = 0;
  for (const auto& rec : summary.records) total_trials += rec.trials.size();
  CHECK(lines == total_trials);
}

TEST_CASE("report tables merge rows and disambiguate colliding keys") {
  SummaryRow a;
  a.shape = "rect";
  a.estimator = "oracle";
  a.episodes = 10;
  a.success_rate = 1.0;
  a.mean_trials = 3.25;
  a.max_trials = 5;
  a.run_id = "run_a";

  SummaryRow b = a;
  b.run_id = "run_b";
  b.success_rate = 0.9;

  SummaryRow c;
  c.shape = "circle";
  c.estimator = "noisy";
  c.episodes = 0;
  c.max_trials = 0;
  c.run_id = "run_a";

  std::ostringstream out;
  write_report_table({a, b, c}, out);
  const std::string table = out.str();
  CHECK(table.find("100.0%") != std::string::npos);
  CHECK(table.find("90.0%") != std::string::npos);
  CHECK(table.find("run_a") != std::string::npos);  // collision keeps both rows
  CHECK(table.find("run_b") != std::string::npos);
  CHECK(table.find("circle") != std::string::npos);
  CHECK(table.find("3.25") != std::string::npos);
  CHECK(table.find("-") != std::string::npos);  // empty-rate placeholder
}

TEST_CASE("manifests carry the run metadata and leave no temp file behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tactile_pack_manifest_test";
  fs::create_directories(dir);
  const std::string path = (dir / "manifest.json").string();

  write_manifest(path, {{"episodes", "10"}, {"seed", "42"}}, 42,
                 {"summary.csv", "scatter.csv"}, 1.25);

  std::ifstream in(path);
  REQUIRE(in.good());
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["tool"] == "tactile-pack");
  CHECK(doc["seed"] == 42);
  CHECK(doc["duration_seconds"] == 1.25);
  CHECK(doc["config"]["episodes"] == "10");
  CHECK(doc["outputs"].size() == 2);
  const std::string stamp = doc["created_utc"].get<std::string>();
  CHECK(stamp.size() == 20);
  CHECK(stamp.back() == 'Z');

  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);  // the temporary rename target is gone
  fs::remove_all(dir);
}

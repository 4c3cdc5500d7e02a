#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactile_pack/contact.hpp"
#include "tactile_pack/controller.hpp"
#include "tactile_pack/estimation.hpp"
#include "tactile_pack/geometry.hpp"
#include "tactile_pack/tactile.hpp"

namespace tactile_pack {

// Flat "section.key = value" run configuration. '#' starts a comment, blank
// lines are skipped, later duplicates win. Unknown keys are rejected so typos
// fail loudly.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigFile {
  // Key -> (value, line number), insertion-ordered key list for diagnostics.
  std::map<std::string, std::pair<std::string, int>> values;
  std::vector<std::string> ordered_keys;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
};

ConfigFile parse_config_text(const std::string& text, const std::string& origin);
ConfigFile parse_config_file(const std::string& path);

enum class EstimatorKind {
  kOracle,
  kNoisy,
  kLinear,
};

const char* estimator_kind_name(EstimatorKind kind);
EstimatorKind estimator_kind_from_name(const std::string& name);

struct TactileParams {
  SensorLayout layout;
  double noise_sigma = 0.0;
  // Default slip threshold: half the weakest noise-free frame-8 shear peak
  // over the pivoting blocked contacts of the reference rectangle (51x80 in
  // a 56 mm gap, 61x61 error grid). The slip calibration test recomputes
  // this value. Perfectly centred two-sided jams produce no pivot and no
  // shear, so no threshold can flag them.
  double tau_slip = 0.13076123665680775;
};

// One named object entry in a run plan.
struct ShapeEntry {
  std::string name;
  ShapeSpec spec;
  std::optional<double> gap_width;
  std::optional<double> error_range_x;
};

// Parsed run plan shared by datagen/experiment commands.
struct RunConfig {
  std::vector<ShapeEntry> shapes;
  double clearance = 2.0;        // per side, used when gap_width is absent
  double error_range_theta = 15.0;
  std::optional<double> error_range_x;  // global override; default 30% of width
  int max_trials = 15;
  int episodes = 100;
  int samples_per_shape = 2000;
  EstimatorKind estimator = EstimatorKind::kOracle;
  std::string weights_path;
  bool extreme_corners = false;
  int vertex_count = 64;
  int threads = 1;
  uint64_t seed = 0;
  std::optional<double> gap_width;  // global override
  NoiseModel noise;
  ClassifierThresholds thresholds;
  ControllerParams controller;
  ContactParams contact;
  TactileParams tactile;

  void validate() const;
};

RunConfig run_config_from_file(const ConfigFile& file);

// Fully resolved single-shape experiment setup.
struct ExperimentConfig {
  std::string shape_name;
  ShapeSpec shape;
  GapEnvironment env;
  double error_range_x = 15.0;
  double error_range_theta = 15.0;
  int max_trials = 15;
  int episodes = 100;
  EstimatorKind estimator = EstimatorKind::kOracle;
  std::string weights_path;
  bool extreme_corners = false;
  int vertex_count = 64;
  int threads = 1;
  uint64_t seed = 0;
  NoiseModel noise;
  ClassifierThresholds thresholds;
  ControllerParams controller;
  ContactParams contact;
  TactileParams tactile;

  void validate() const;
};

ExperimentConfig make_experiment_config(const RunConfig& run, const ShapeEntry& entry);

// Key/value snapshot of a run config for manifests (sorted by key).
std::map<std::string, std::string> config_snapshot(const RunConfig& run);

}  // namespace tactile_pack

#include "tactile_pack/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tactile_pack {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& message) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + message);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second.first;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& text = it->second.first;
  try {
    size_t consumed = 0;
    const double v = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(it->second.second) +
                      "): expected a number, got '" + text + "'");
  }
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& text = it->second.first;
  try {
    size_t consumed = 0;
    const int v = std::stoi(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(it->second.second) +
                      "): expected an integer, got '" + text + "'");
  }
}

uint64_t ConfigFile::get_u64(const std::string& key, uint64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& text = it->second.first;
  try {
    size_t consumed = 0;
    const unsigned long long v = std::stoull(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return static_cast<uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(it->second.second) +
                      "): expected an unsigned integer, got '" + text + "'");
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& text = it->second.first;
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("config key '" + key + "' (line " + std::to_string(it->second.second) +
                    "): expected a boolean, got '" + text + "'");
}

ConfigFile parse_config_text(const std::string& text, const std::string& origin) {
  ConfigFile file;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail_at(origin, line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_at(origin, line_no, "empty key");
    if (value.empty()) fail_at(origin, line_no, "empty value for key '" + key + "'");
    if (file.values.find(key) == file.values.end()) file.ordered_keys.push_back(key);
    file.values[key] = {value, line_no};
  }
  return file;
}

ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

const char* estimator_kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kOracle: return "oracle";
    case EstimatorKind::kNoisy: return "noisy";
    case EstimatorKind::kLinear: return "linear";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_name(const std::string& name) {
  if (name == "oracle") return EstimatorKind::kOracle;
  if (name == "noisy") return EstimatorKind::kNoisy;
  if (name == "linear") return EstimatorKind::kLinear;
  throw ConfigError("unknown estimator '" + name + "' (expected oracle, noisy, or linear)");
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ShapeSpec shape_from_config(const ConfigFile& file, const std::string& prefix) {
  const std::string kind_text = file.get_string(prefix + ".kind", "");
  if (kind_text.empty()) throw ConfigError("missing config key '" + prefix + ".kind'");
  const ShapeKind kind = shape_kind_from_name(kind_text);
  switch (kind) {
    case ShapeKind::kCircle: {
      const double r = file.get_double(prefix + ".radius", -1.0);
      if (r <= 0.0) throw ConfigError("missing or invalid '" + prefix + ".radius'");
      return ShapeSpec::circle(r);
    }
    case ShapeKind::kHexagon: {
      const double r = file.get_double(prefix + ".circumradius", -1.0);
      if (r <= 0.0) throw ConfigError("missing or invalid '" + prefix + ".circumradius'");
      return ShapeSpec::hexagon(r);
    }
    case ShapeKind::kRectangle:
    case ShapeKind::kEllipse: {
      const double w = file.get_double(prefix + ".width", -1.0);
      const double l = file.get_double(prefix + ".length", -1.0);
      if (w <= 0.0 || l <= 0.0) {
        throw ConfigError("missing or invalid '" + prefix + ".width'/'" + prefix + ".length'");
      }
      return kind == ShapeKind::kRectangle ? ShapeSpec::rectangle(w, l)
                                           : ShapeSpec::ellipse(w, l);
    }
    case ShapeKind::kRoundedRectangle: {
      const double w = file.get_double(prefix + ".width", -1.0);
      const double l = file.get_double(prefix + ".length", -1.0);
      const double r = file.get_double(prefix + ".corner_radius", -1.0);
      if (w <= 0.0 || l <= 0.0 || r <= 0.0) {
        throw ConfigError("missing or invalid dimensions under '" + prefix + "'");
      }
      return ShapeSpec::rounded_rectangle(w, l, r);
    }
  }
  throw ConfigError("unknown shape kind under '" + prefix + "'");
}

void validate_shape_name(const std::string& name) {
  if (name.empty()) throw ConfigError("shape name must not be empty");
  for (const char c : name) {
    // Names end up in file names and CSV cells.
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
      throw ConfigError("shape name '" + name +
                        "' may only contain letters, digits, '_', '-', '.'");
    }
  }
}

// Only keys the declared kind actually reads are accepted, so e.g. a radius
// on a rectangle fails loudly instead of being silently ignored.
bool shape_param_allowed(ShapeKind kind, const std::string& param) {
  if (param == "kind" || param == "gap_width" || param == "error_range_x") return true;
  switch (kind) {
    case ShapeKind::kCircle: return param == "radius";
    case ShapeKind::kHexagon: return param == "circumradius";
    case ShapeKind::kRectangle:
    case ShapeKind::kEllipse: return param == "width" || param == "length";
    case ShapeKind::kRoundedRectangle:
      return param == "width" || param == "length" || param == "corner_radius";
  }
  return false;
}

const std::set<std::string> kTopLevelKeys = {
    "seed", "episodes", "max_trials", "samples_per_shape", "estimator", "weights",
    "clearance", "gap_width", "error_range_x", "error_range_theta", "vertex_count",
    "extreme_corners", "threads", "shapes",
    "noise.direction_accuracy", "noise.magnitude_half_width_x",
    "noise.magnitude_half_width_theta",
    "thresholds.t_x", "thresholds.t_theta",
    "controller.consistent_factor", "controller.no_sign_factor",
    "controller.constant_step_x", "controller.constant_step_theta",
    "controller.clip_x", "controller.clip_theta", "controller.clip_from_trial",
    "contact.descent_per_frame", "contact.frames", "contact.min_lever",
    "tactile.grid_rows", "tactile.grid_cols", "tactile.marker_spacing",
    "tactile.pivot_depth", "tactile.noise_sigma", "tactile.tau_slip"};

void reject_unknown_keys(const ConfigFile& file, const std::vector<ShapeEntry>& entries,
                         bool anonymous_shape) {
  for (const auto& key : file.ordered_keys) {
    if (kTopLevelKeys.count(key)) continue;
    bool ok = false;
    if (key.rfind("shape.", 0) == 0) {
      const std::string rest = key.substr(6);
      if (anonymous_shape) {
        ok = rest.find('.') == std::string::npos &&
             shape_param_allowed(entries.front().spec.kind, rest);
      } else {
        const size_t dot = rest.find('.');
        if (dot != std::string::npos) {
          const std::string name = rest.substr(0, dot);
          const std::string param = rest.substr(dot + 1);
          for (const auto& entry : entries) {
            if (entry.name == name) {
              ok = shape_param_allowed(entry.spec.kind, param);
              break;
            }
          }
        }
      }
    }
    if (!ok) {
      fail_at("config", file.values.at(key).second, "unknown key '" + key + "'");
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (shapes.empty()) throw ConfigError("config declares no shapes");
  if (max_trials < 1) throw ConfigError("max_trials must be at least 1");
  if (episodes < 0) throw ConfigError("episodes must be non-negative");
  if (samples_per_shape < 1) throw ConfigError("samples_per_shape must be at least 1");
  if (!(clearance > 0.0)) throw ConfigError("clearance must be positive");
  if (error_range_theta < 0.0) throw ConfigError("error_range_theta must be non-negative");
  if (error_range_x && *error_range_x < 0.0) {
    throw ConfigError("error_range_x must be non-negative");
  }
  if (vertex_count < 3) throw ConfigError("vertex_count must be at least 3");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  noise.validate();
  thresholds.validate();
  controller.validate();
  contact.validate();
  tactile.layout.validate();
  if (tactile.noise_sigma < 0.0) throw ConfigError("tactile.noise_sigma must be non-negative");
  if (!(tactile.tau_slip > 0.0)) throw ConfigError("tactile.tau_slip must be positive");
  for (const auto& entry : shapes) {
    validate_shape_name(entry.name);
    entry.spec.validate();
    if (entry.gap_width && !(*entry.gap_width > 0.0)) {
      throw ConfigError("gap_width must be positive for shape '" + entry.name + "'");
    }
    if (entry.error_range_x && *entry.error_range_x < 0.0) {
      throw ConfigError("error_range_x must be non-negative for shape '" + entry.name + "'");
    }
  }
}

RunConfig run_config_from_file(const ConfigFile& file) {
  RunConfig run;
  run.seed = file.get_u64("seed", run.seed);
  run.episodes = file.get_int("episodes", run.episodes);
  run.max_trials = file.get_int("max_trials", run.max_trials);
  run.samples_per_shape = file.get_int("samples_per_shape", run.samples_per_shape);
  run.estimator = estimator_kind_from_name(
      file.get_string("estimator", estimator_kind_name(run.estimator)));
  run.weights_path = file.get_string("weights", run.weights_path);
  run.clearance = file.get_double("clearance", run.clearance);
  if (file.has("gap_width")) run.gap_width = file.get_double("gap_width", 0.0);
  if (file.has("error_range_x")) run.error_range_x = file.get_double("error_range_x", 0.0);
  run.error_range_theta = file.get_double("error_range_theta", run.error_range_theta);
  run.vertex_count = file.get_int("vertex_count", run.vertex_count);
  run.extreme_corners = file.get_bool("extreme_corners", run.extreme_corners);
  run.threads = file.get_int("threads", run.threads);

  run.noise.direction_accuracy =
      file.get_double("noise.direction_accuracy", run.noise.direction_accuracy);
  run.noise.magnitude_half_width_x =
      file.get_double("noise.magnitude_half_width_x", run.noise.magnitude_half_width_x);
  run.noise.magnitude_half_width_theta =
      file.get_double("noise.magnitude_half_width_theta", run.noise.magnitude_half_width_theta);
  run.thresholds.t_x = file.get_double("thresholds.t_x", run.thresholds.t_x);
  run.thresholds.t_theta = file.get_double("thresholds.t_theta", run.thresholds.t_theta);
  run.controller.consistent_factor =
      file.get_double("controller.consistent_factor", run.controller.consistent_factor);
  run.controller.no_sign_factor =
      file.get_double("controller.no_sign_factor", run.controller.no_sign_factor);
  run.controller.constant_step_x =
      file.get_double("controller.constant_step_x", run.controller.constant_step_x);
  run.controller.constant_step_theta =
      file.get_double("controller.constant_step_theta", run.controller.constant_step_theta);
  run.controller.clip_x = file.get_double("controller.clip_x", run.controller.clip_x);
  run.controller.clip_theta = file.get_double("controller.clip_theta", run.controller.clip_theta);
  run.controller.clip_from_trial =
      file.get_int("controller.clip_from_trial", run.controller.clip_from_trial);
  run.contact.descent_per_frame =
      file.get_double("contact.descent_per_frame", run.contact.descent_per_frame);
  run.contact.frames = file.get_int("contact.frames", run.contact.frames);
  run.contact.min_lever = file.get_double("contact.min_lever", run.contact.min_lever);
  run.tactile.layout.grid_rows = file.get_int("tactile.grid_rows", run.tactile.layout.grid_rows);
  run.tactile.layout.grid_cols = file.get_int("tactile.grid_cols", run.tactile.layout.grid_cols);
  run.tactile.layout.marker_spacing =
      file.get_double("tactile.marker_spacing", run.tactile.layout.marker_spacing);
  run.tactile.layout.pivot_depth =
      file.get_double("tactile.pivot_depth", run.tactile.layout.pivot_depth);
  run.tactile.noise_sigma = file.get_double("tactile.noise_sigma", run.tactile.noise_sigma);
  run.tactile.tau_slip = file.get_double("tactile.tau_slip", run.tactile.tau_slip);

  std::vector<std::string> shape_names;
  bool anonymous_shape = false;
  if (file.has("shapes")) {
    shape_names = split_list(file.get_string("shapes", ""));
    if (shape_names.empty()) throw ConfigError("'shapes' lists no shape names");
    for (const auto& name : shape_names) {
      validate_shape_name(name);
      ShapeEntry entry;
      entry.name = name;
      const std::string prefix = "shape." + name;
      entry.spec = shape_from_config(file, prefix);
      if (file.has(prefix + ".gap_width")) {
        entry.gap_width = file.get_double(prefix + ".gap_width", 0.0);
      }
      if (file.has(prefix + ".error_range_x")) {
        entry.error_range_x = file.get_double(prefix + ".error_range_x", 0.0);
      }
      run.shapes.push_back(std::move(entry));
    }
  } else if (file.has("shape.kind")) {
    anonymous_shape = true;
    ShapeEntry entry;
    entry.spec = shape_from_config(file, "shape");
    entry.name = shape_kind_name(entry.spec.kind);
    if (file.has("shape.gap_width")) entry.gap_width = file.get_double("shape.gap_width", 0.0);
    if (file.has("shape.error_range_x")) {
      entry.error_range_x = file.get_double("shape.error_range_x", 0.0);
    }
    run.shapes.push_back(std::move(entry));
  } else {
    throw ConfigError("config must declare 'shapes = ...' or a 'shape.kind' block");
  }

  reject_unknown_keys(file, run.shapes, anonymous_shape);
  run.validate();
  return run;
}

void ExperimentConfig::validate() const {
  shape.validate();
  env.validate();
  if (error_range_x < 0.0 || error_range_theta < 0.0) {
    throw ConfigError("error ranges must be non-negative");
  }
  if (max_trials < 1) throw ConfigError("max_trials must be at least 1");
  if (episodes < 0) throw ConfigError("episodes must be non-negative");
  if (vertex_count < 3) throw ConfigError("vertex_count must be at least 3");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  noise.validate();
  thresholds.validate();
  controller.validate();
  contact.validate();
  tactile.layout.validate();
}

ExperimentConfig make_experiment_config(const RunConfig& run, const ShapeEntry& entry) {
  ExperimentConfig cfg;
  cfg.shape_name = entry.name;
  cfg.shape = entry.spec;
  cfg.env.gap_width = entry.gap_width.value_or(
      run.gap_width.value_or(entry.spec.nominal_width() + 2.0 * run.clearance));
  cfg.error_range_x = entry.error_range_x.value_or(
      run.error_range_x.value_or(0.3 * entry.spec.nominal_width()));
  cfg.error_range_theta = run.error_range_theta;
  cfg.max_trials = run.max_trials;
  cfg.episodes = run.episodes;
  cfg.estimator = run.estimator;
  cfg.weights_path = run.weights_path;
  cfg.extreme_corners = run.extreme_corners;
  cfg.vertex_count = run.vertex_count;
  cfg.threads = run.threads;
  cfg.seed = run.seed;
  cfg.noise = run.noise;
  cfg.thresholds = run.thresholds;
  cfg.controller = run.controller;
  cfg.contact = run.contact;
  cfg.tactile = run.tactile;
  cfg.validate();
  return cfg;
}

std::map<std::string, std::string> config_snapshot(const RunConfig& run) {
  std::map<std::string, std::string> snap;
  snap["seed"] = std::to_string(run.seed);
  snap["episodes"] = std::to_string(run.episodes);
  snap["max_trials"] = std::to_string(run.max_trials);
  snap["samples_per_shape"] = std::to_string(run.samples_per_shape);
  snap["estimator"] = estimator_kind_name(run.estimator);
  if (!run.weights_path.empty()) snap["weights"] = run.weights_path;
  snap["clearance"] = format_double(run.clearance);
  if (run.gap_width) snap["gap_width"] = format_double(*run.gap_width);
  if (run.error_range_x) snap["error_range_x"] = format_double(*run.error_range_x);
  snap["error_range_theta"] = format_double(run.error_range_theta);
  snap["vertex_count"] = std::to_string(run.vertex_count);
  snap["extreme_corners"] = run.extreme_corners ? "true" : "false";
  snap["threads"] = std::to_string(run.threads);
  snap["noise.direction_accuracy"] = format_double(run.noise.direction_accuracy);
  snap["noise.magnitude_half_width_x"] = format_double(run.noise.magnitude_half_width_x);
  snap["noise.magnitude_half_width_theta"] = format_double(run.noise.magnitude_half_width_theta);
  snap["thresholds.t_x"] = format_double(run.thresholds.t_x);
  snap["thresholds.t_theta"] = format_double(run.thresholds.t_theta);
  snap["controller.consistent_factor"] = format_double(run.controller.consistent_factor);
  snap["controller.no_sign_factor"] = format_double(run.controller.no_sign_factor);
  snap["controller.constant_step_x"] = format_double(run.controller.constant_step_x);
  snap["controller.constant_step_theta"] = format_double(run.controller.constant_step_theta);
  snap["controller.clip_x"] = format_double(run.controller.clip_x);
  snap["controller.clip_theta"] = format_double(run.controller.clip_theta);
  snap["controller.clip_from_trial"] = std::to_string(run.controller.clip_from_trial);
  snap["contact.descent_per_frame"] = format_double(run.contact.descent_per_frame);
  snap["contact.frames"] = std::to_string(run.contact.frames);
  snap["contact.min_lever"] = format_double(run.contact.min_lever);
  snap["tactile.grid_rows"] = std::to_string(run.tactile.layout.grid_rows);
  snap["tactile.grid_cols"] = std::to_string(run.tactile.layout.grid_cols);
  snap["tactile.marker_spacing"] = format_double(run.tactile.layout.marker_spacing);
  snap["tactile.pivot_depth"] = format_double(run.tactile.layout.pivot_depth);
  snap["tactile.noise_sigma"] = format_double(run.tactile.noise_sigma);
  snap["tactile.tau_slip"] = format_double(run.tactile.tau_slip);
  for (const auto& entry : run.shapes) {
    const std::string prefix = "shape." + entry.name + ".";
    snap[prefix + "kind"] = shape_kind_name(entry.spec.kind);
    switch (entry.spec.kind) {
      case ShapeKind::kCircle:
        snap[prefix + "radius"] = format_double(0.5 * entry.spec.width);
        break;
      case ShapeKind::kHexagon:
        snap[prefix + "circumradius"] = format_double(0.5 * entry.spec.width);
        break;
      case ShapeKind::kRoundedRectangle:
        snap[prefix + "corner_radius"] = format_double(entry.spec.corner_radius);
        [[fallthrough]];
      case ShapeKind::kRectangle:
      case ShapeKind::kEllipse:
        snap[prefix + "width"] = format_double(entry.spec.width);
        snap[prefix + "length"] = format_double(entry.spec.length);
        break;
    }
    if (entry.gap_width) snap[prefix + "gap_width"] = format_double(*entry.gap_width);
    if (entry.error_range_x) snap[prefix + "error_range_x"] = format_double(*entry.error_range_x);
  }
  return snap;
}

}  // namespace tactile_pack

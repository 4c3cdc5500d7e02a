#include "tactile_pack/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "tactile_pack/rng.hpp"

namespace tactile_pack {

void SensorLayout::validate() const {
  if (grid_rows < 1 || grid_cols < 1) {
    throw std::invalid_argument("marker grid must have at least 1x1 markers");
  }
  if (!(marker_spacing > 0.0)) throw std::invalid_argument("marker_spacing must be positive");
  if (!(pivot_depth > patch_half_height())) {
    throw std::invalid_argument("pivot_depth must exceed the patch half-height");
  }
}

namespace {

MarkerField zero_field(const SensorLayout& layout) {
  MarkerField f;
  f.rows = layout.grid_rows;
  f.cols = layout.grid_cols;
  const size_t n = static_cast<size_t>(f.rows) * static_cast<size_t>(f.cols);
  f.shear_x.assign(n, 0.0);
  f.shear_z.assign(n, 0.0);
  f.pressure.assign(n, 0.0);
  return f;
}

}  // namespace

TactileSequence render_sequence(const TwistDecomposition& decomp, const Twist& twist,
                                const SensorLayout& layout, double noise_sigma,
                                uint64_t rng_seed) {
  layout.validate();
  if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be non-negative");
  (void)twist;  // frame count is fixed by the sequence type

  TactileSequence seq;
  for (auto& pair : seq.frames) {
    pair.a = zero_field(layout);
    pair.b = zero_field(layout);
  }

  const double in_rate = deg_to_rad(decomp.in_plane);
  const double out_rate = deg_to_rad(std::abs(decomp.out_of_plane));
  const double s = static_cast<double>(decomp.shear_sign);
  const double p = static_cast<double>(decomp.pressure_sign);
  const double half_h = layout.patch_half_height();
  const double half_w = layout.patch_half_width();

  Rng rng(mix_seed(rng_seed, 0x7ac71e5eedULL));
  for (int k = 1; k < kTactileFrames; ++k) {
    SensorFramePair& pair = seq.frames[k];
    const double steps = static_cast<double>(k);  // frames since frame 1
    const double swirl = s * in_rate * steps;
    const double press = p * out_rate * steps;
    for (int row = 0; row < layout.grid_rows; ++row) {
      const double w = -half_h + row * layout.marker_spacing;  // patch z
      const double arm = w + layout.pivot_depth;               // height above pivot
      for (int col = 0; col < layout.grid_cols; ++col) {
        const double u = -half_w + col * layout.marker_spacing;  // patch x
        const int i = pair.a.index(row, col);
        pair.a.shear_x[i] = swirl * arm;
        pair.a.shear_z[i] = -swirl * u;
        pair.a.pressure[i] = press * arm;
        pair.b.shear_x[i] = -pair.a.shear_x[i];
        pair.b.shear_z[i] = pair.a.shear_z[i];
        pair.b.pressure[i] = -pair.a.pressure[i];
      }
    }
    if (noise_sigma > 0.0) {
      auto add_noise = [&](MarkerField& f) {
        for (auto& v : f.shear_x) v += noise_sigma * rng.gaussian();
        for (auto& v : f.shear_z) v += noise_sigma * rng.gaussian();
        for (auto& v : f.pressure) v += noise_sigma * rng.gaussian();
      };
      add_noise(pair.a);
      add_noise(pair.b);
    }
  }
  return seq;
}

double slip_metric(const TactileSequence& seq, int frames_so_far) {
  if (frames_so_far < 1 || frames_so_far > kTactileFrames) {
    throw std::invalid_argument("frames_so_far must be in [1, 8]");
  }
  const SensorFramePair& pair = seq.frames[frames_so_far - 1];
  double best = 0.0;
  auto scan = [&best](const MarkerField& f) {
    for (size_t i = 0; i < f.shear_x.size(); ++i) {
      best = std::max(best, std::hypot(f.shear_x[i], f.shear_z[i]));
    }
  };
  scan(pair.a);
  scan(pair.b);
  return best;
}

bool incipient_slip(const TactileSequence& seq, int frames_so_far, double tau_slip) {
  return slip_metric(seq, frames_so_far) >= tau_slip;
}

int slip_trigger_frame(const TactileSequence& seq, double tau_slip) {
  for (int k = 1; k <= kTactileFrames; ++k) {
    if (incipient_slip(seq, k, tau_slip)) return k;
  }
  return 0;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  out.append(buf, static_cast<size_t>(n));
}

}  // namespace

void dump_sequence_csv(const TactileSequence& seq, std::ostream& out) {
  std::string text = "frame,sensor,row,col,shear_x,shear_z,pressure\n";
  for (int k = 0; k < kTactileFrames; ++k) {
    for (int sensor = 0; sensor < 2; ++sensor) {
      const MarkerField& f = sensor == 0 ? seq.frames[k].a : seq.frames[k].b;
      for (int row = 0; row < f.rows; ++row) {
        for (int col = 0; col < f.cols; ++col) {
          const int i = f.index(row, col);
          text += std::to_string(k + 1);
          text += sensor == 0 ? ",A," : ",B,";
          text += std::to_string(row);
          text += ',';
          text += std::to_string(col);
          text += ',';
          append_number(text, f.shear_x[i]);
          text += ',';
          append_number(text, f.shear_z[i]);
          text += ',';
          append_number(text, f.pressure[i]);
          text += '\n';
        }
      }
    }
  }
  out << text;
}

void dump_sequence_pgm(const TactileSequence& seq, const std::string& prefix) {
  double max_abs = 0.0;
  for (const auto& pair : seq.frames) {
    for (const MarkerField* f : {&pair.a, &pair.b}) {
      for (double v : f->pressure) max_abs = std::max(max_abs, std::abs(v));
    }
  }
  if (max_abs == 0.0) max_abs = 1.0;

  for (int k = 0; k < kTactileFrames; ++k) {
    for (int sensor = 0; sensor < 2; ++sensor) {
      const MarkerField& f = sensor == 0 ? seq.frames[k].a : seq.frames[k].b;
      const std::string path =
          prefix + "_f" + std::to_string(k + 1) + (sensor == 0 ? "_a.pgm" : "_b.pgm");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open PGM output: " + path);
      out << "P5\n" << f.cols << " " << f.rows << "\n255\n";
      for (int row = 0; row < f.rows; ++row) {
        for (int col = 0; col < f.cols; ++col) {
          const double v = f.pressure[f.index(row, col)];
          const double scaled = 255.0 * (v + max_abs) / (2.0 * max_abs);
          const int byte = std::clamp(static_cast<int>(std::lround(scaled)), 0, 255);
          out.put(static_cast<char>(byte));
        }
      }
      if (!out) throw std::runtime_error("failed writing PGM output: " + path);
    }
  }
}

}  // namespace tactile_pack

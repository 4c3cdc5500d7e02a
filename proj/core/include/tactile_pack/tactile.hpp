#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tactile_pack/contact.hpp"
#include "tactile_pack/vec2.hpp"

namespace tactile_pack {

// Synthetic marker-grid imprints for the two opposing gel pads (A and B,
// normals along -y/+y). Every frame stores the difference from frame 1, so
// frame 1 is identically zero and the fields grow linearly with frame index
// for a constant twist.

struct SensorLayout {
  int grid_rows = 9;            // along the vertical patch axis z
  int grid_cols = 9;            // along the in-pad horizontal axis x
  double marker_spacing = 2.0;  // mm between neighbouring markers
  Vec2 patch_center = {0.0, 0.0};
  // Height of the patch centre above the resting edge the object pivots on.
  // Must exceed the patch half-height so the whole patch sits above the
  // pivot line.
  double pivot_depth = 20.0;

  void validate() const;
  double patch_half_height() const { return 0.5 * (grid_rows - 1) * marker_spacing; }
  double patch_half_width() const { return 0.5 * (grid_cols - 1) * marker_spacing; }
};

// Row-major marker grid; row 0 is the patch bottom.
struct MarkerField {
  int rows = 0;
  int cols = 0;
  std::vector<double> shear_x;   // mm
  std::vector<double> shear_z;   // mm
  std::vector<double> pressure;  // mm of indentation change

  int index(int row, int col) const { return row * cols + col; }
};

struct SensorFramePair {
  MarkerField a;
  MarkerField b;
};

inline constexpr int kTactileFrames = 8;

struct TactileSequence {
  std::array<SensorFramePair, kTactileFrames> frames;
};

// Integrate the per-frame twist into an 8-frame difference sequence.
// Pad B mirrors pad A's shear x and carries the opposite-signed pressure.
// noise_sigma adds i.i.d. Gaussian measurement noise to every component of
// frames 2..8 when positive.
TactileSequence render_sequence(const TwistDecomposition& decomp, const Twist& twist,
                                const SensorLayout& layout, double noise_sigma,
                                uint64_t rng_seed);

// Largest per-marker shear magnitude across both pads in frame `frames_so_far`.
double slip_metric(const TactileSequence& seq, int frames_so_far);

bool incipient_slip(const TactileSequence& seq, int frames_so_far, double tau_slip);

// First frame (1-based) whose slip metric reaches tau_slip, or 0 if none.
int slip_trigger_frame(const TactileSequence& seq, double tau_slip);

// Marker dump, one row per marker: frame,sensor,row,col,shear_x,shear_z,pressure.
void dump_sequence_csv(const TactileSequence& seq, std::ostream& out);

// One 8-bit PGM per frame per sensor ("<prefix>_f<k>_<a|b>.pgm"), pressure
// mapped linearly from [-max|p|, +max|p|] over the sequence to [0, 255].
void dump_sequence_pgm(const TactileSequence& seq, const std::string& prefix);

}  // namespace tactile_pack

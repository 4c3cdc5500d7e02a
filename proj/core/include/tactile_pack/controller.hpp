#pragma once

#include "tactile_pack/estimation.hpp"
#include "tactile_pack/geometry.hpp"

namespace tactile_pack {

// Trial-to-trial pose correction. Each axis is handled independently from
// its estimated sign S and magnitude e:
//   S agrees with e   -> step back by consistent_factor * e
//   S is zero         -> step back by no_sign_factor * e
//   S contradicts e   -> constant step against S
// From clip_from_trial onwards corrections are clamped to +/-clip.
struct ControllerParams {
  double consistent_factor = 0.7;
  double no_sign_factor = 0.3;
  double constant_step_x = 3.0;      // mm
  double constant_step_theta = 3.0;  // deg
  double clip_x = 4.0;               // mm
  double clip_theta = 4.0;           // deg
  int clip_from_trial = 2;

  void validate() const;
};

struct Correction {
  double cx = 0.0;      // mm
  double ctheta = 0.0;  // deg
};

Correction correction(const SignPair& signs, const ErrorEstimate& estimate, int trial,
                      const ControllerParams& params);

ErrorState apply(const ErrorState& error, const Correction& corr);

}  // namespace tactile_pack

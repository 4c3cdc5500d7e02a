#include "tactile_pack/controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace tactile_pack {

void ControllerParams::validate() const {
  if (!(consistent_factor > 0.0)) throw std::invalid_argument("consistent_factor must be positive");
  if (!(no_sign_factor > 0.0)) throw std::invalid_argument("no_sign_factor must be positive");
  if (!(constant_step_x > 0.0) || !(constant_step_theta > 0.0)) {
    throw std::invalid_argument("constant steps must be positive");
  }
  if (!(clip_x > 0.0) || !(clip_theta > 0.0)) {
    throw std::invalid_argument("clip limits must be positive");
  }
  if (clip_from_trial < 2) throw std::invalid_argument("clip_from_trial must be at least 2");
}

namespace {

double axis_correction(int sign, double estimate, double consistent_factor, double no_sign_factor,
                       double constant_step) {
  if (sign == 0) return -no_sign_factor * estimate;
  if (static_cast<double>(sign) * estimate > 0.0) return -consistent_factor * estimate;
  // Estimated sign contradicts (or the magnitude reads zero): take a fixed
  // step against the detected direction.
  return -constant_step * static_cast<double>(sign);
}

// Normalise -0.0 so logs and CSVs do not leak the sign bit.
double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

}  // namespace

Correction correction(const SignPair& signs, const ErrorEstimate& estimate, int trial,
                      const ControllerParams& params) {
  params.validate();
  if (trial < 1) throw std::invalid_argument("trial index must be 1-based");

  Correction corr;
  corr.cx = axis_correction(signs.sx, estimate.dx_e, params.consistent_factor,
                            params.no_sign_factor, params.constant_step_x);
  corr.ctheta = axis_correction(signs.stheta, estimate.dtheta_e, params.consistent_factor,
                                params.no_sign_factor, params.constant_step_theta);
  if (trial >= params.clip_from_trial) {
    corr.cx = std::clamp(corr.cx, -params.clip_x, params.clip_x);
    corr.ctheta = std::clamp(corr.ctheta, -params.clip_theta, params.clip_theta);
  }
  corr.cx = clean_zero(corr.cx);
  corr.ctheta = clean_zero(corr.ctheta);
  return corr;
}

ErrorState apply(const ErrorState& error, const Correction& corr) {
  return {error.dx + corr.cx, error.dtheta + corr.ctheta};
}

}  // namespace tactile_pack

#pragma once

#include "tactile_pack/geometry.hpp"
#include "tactile_pack/vec2.hpp"

namespace tactile_pack {

// Quasi-static contact between the descending object and the block edges.
// A blocked descent makes the object pivot about the edge it rests on; the
// grip frame is yawed by dtheta relative to that edge, so the per-frame
// twist splits into a component parallel to the gel pads (marker shear) and
// one tipping into them (pressure change).

enum class ContactSide {
  kNone,
  kLeft,
  kRight,
  kBoth,
};

const char* contact_side_name(ContactSide side);

struct ContactParams {
  double descent_per_frame = 0.5;  // mm of commanded descent per tactile frame
  int frames = 8;
  double min_lever = 5.0;  // mm, floor on the pivot lever arm

  void validate() const;
};

struct ContactEvent {
  bool blocked = false;
  ContactSide side = ContactSide::kNone;
  Vec2 contact_point;       // gap frame, on the overlapped block edge
  double lever_arm = 0.0;   // mm, |edge x - centroid x|
  double edge_angle = 0.0;  // deg, pivot-line misalignment with the gel plane
  // Normalised overlap asymmetry for two-sided jams in [0, 1]; 1 for
  // single-sided contact. A perfectly centred jam (0) produces pressure
  // buildup but no net pivot.
  double both_asymmetry = 1.0;
};

// Per-frame rigid pivot of the blocked object.
struct Twist {
  Vec2 axis_xy;                 // unit pivot axis in the horizontal plane
  double angle_per_frame = 0.0; // deg/frame, non-negative
  int frames = 8;
};

// Twist split relative to the gel plane (pad normals along +/-y).
struct TwistDecomposition {
  double in_plane = 0.0;      // deg/frame about the pad normal -> marker shear
  double out_of_plane = 0.0;  // deg/frame about the in-pad x axis -> pressure
  int shear_sign = 0;         // +1 left contact, -1 right contact
  int pressure_sign = 0;      // sign(out_of_plane * shear_sign)
};

// Lower the object at the erroneous pose until it seats or rests on a block.
ContactEvent descend(const CrossSection& section, const ErrorState& error,
                     const GapEnvironment& env);

// Pivot rate implied by continued descent against the resting edge.
// Throws std::logic_error if the event is not blocked.
Twist pivot_twist(const ContactEvent& event, double descent_per_frame, int frames,
                  double min_lever);

inline Twist pivot_twist(const ContactEvent& event, const ContactParams& params) {
  return pivot_twist(event, params.descent_per_frame, params.frames, params.min_lever);
}

// Split the twist into gel-parallel and gel-normal parts.
// Throws std::logic_error if the event is not blocked.
TwistDecomposition decompose_twist(const Twist& twist, const ContactEvent& event);

}  // namespace tactile_pack

#include "tactile_pack/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tactile_pack {

const char* contact_side_name(ContactSide side) {
  switch (side) {
    case ContactSide::kNone: return "none";
    case ContactSide::kLeft: return "left";
    case ContactSide::kRight: return "right";
    case ContactSide::kBoth: return "both";
  }
  return "unknown";
}

void ContactParams::validate() const {
  if (!(descent_per_frame > 0.0)) {
    throw std::invalid_argument("descent_per_frame must be positive");
  }
  if (frames < 1) throw std::invalid_argument("frames must be at least 1");
  if (!(min_lever > 0.0)) throw std::invalid_argument("min_lever must be positive");
}

namespace {

// y coordinate (gap frame) of the rotated, translated vertex with extreme x.
double extreme_vertex_y(const CrossSection& section, double dtheta_deg, bool rightmost) {
  const double a = deg_to_rad(dtheta_deg);
  const double c = std::cos(a);
  const double s = std::sin(a);
  double best_x = rightmost ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
  double best_y = 0.0;
  for (const Vec2& v : section.vertices) {
    const double x = c * v.x - s * v.y;
    const double y = s * v.x + c * v.y;
    if ((rightmost && x > best_x) || (!rightmost && x < best_x)) {
      best_x = x;
      best_y = y;
    }
  }
  return best_y;
}

}  // namespace

ContactEvent descend(const CrossSection& section, const ErrorState& error,
                     const GapEnvironment& env) {
  env.validate();
  const Interval span = rotated_footprint_interval(section, error.dtheta);
  const double half_gap = 0.5 * env.gap_width;
  const double lo = span.lo + error.dx;
  const double hi = span.hi + error.dx;

  ContactEvent event;
  const bool right_hit = hi >= half_gap;
  const bool left_hit = lo <= -half_gap;
  event.blocked = right_hit || left_hit;
  if (!event.blocked) {
    return event;
  }

  event.edge_angle = error.dtheta;
  if (right_hit && left_hit) {
    event.side = ContactSide::kBoth;
    const double overlap_right = hi - half_gap;
    const double overlap_left = -half_gap - lo;
    const double total = overlap_right + overlap_left;
    event.both_asymmetry = total > 0.0 ? std::abs(overlap_right - overlap_left) / total : 0.0;
    const bool right_dominant = overlap_right >= overlap_left;
    const double edge_x = right_dominant ? half_gap : -half_gap;
    event.contact_point = {edge_x, extreme_vertex_y(section, error.dtheta, right_dominant)};
    event.lever_arm = std::abs(edge_x - error.dx);
  } else {
    event.side = right_hit ? ContactSide::kRight : ContactSide::kLeft;
    const double edge_x = right_hit ? half_gap : -half_gap;
    event.contact_point = {edge_x, extreme_vertex_y(section, error.dtheta, right_hit)};
    event.lever_arm = std::abs(edge_x - error.dx);
    event.both_asymmetry = 1.0;
  }
  return event;
}

Twist pivot_twist(const ContactEvent& event, double descent_per_frame, int frames,
                  double min_lever) {
  if (!event.blocked) {
    throw std::logic_error("pivot_twist requires a blocked contact event");
  }
  if (!(descent_per_frame > 0.0)) {
    throw std::invalid_argument("descent_per_frame must be positive");
  }
  if (frames < 1) throw std::invalid_argument("frames must be at least 1");
  if (!(min_lever > 0.0)) throw std::invalid_argument("min_lever must be positive");

  const double lever = std::max(event.lever_arm, min_lever);
  double angle = rad_to_deg(descent_per_frame / lever);
  if (event.side == ContactSide::kBoth) {
    angle *= event.both_asymmetry;
  }

  Twist twist;
  const double beta = deg_to_rad(event.edge_angle);
  twist.axis_xy = {std::sin(beta), std::cos(beta)};
  twist.angle_per_frame = angle;
  twist.frames = frames;
  return twist;
}

TwistDecomposition decompose_twist(const Twist& twist, const ContactEvent& event) {
  if (!event.blocked) {
    throw std::logic_error("decompose_twist requires a blocked contact event");
  }
  TwistDecomposition d;
  d.in_plane = twist.angle_per_frame * twist.axis_xy.y;
  d.out_of_plane = twist.angle_per_frame * twist.axis_xy.x;
  // Two-sided jams pivot about the deeper-overlapped edge; its sign is
  // recoverable from the stored contact point.
  const bool right_like = event.side == ContactSide::kRight ||
                          (event.side == ContactSide::kBoth && event.contact_point.x >= 0.0);
  d.shear_sign = right_like ? -1 : +1;
  const double signed_out = d.out_of_plane * d.shear_sign;
  d.pressure_sign = signed_out > 0.0 ? +1 : (signed_out < 0.0 ? -1 : 0);
  return d;
}

}  // namespace tactile_pack

#pragma once

#include <string>
#include <vector>

#include "tactile_pack/vec2.hpp"

namespace tactile_pack {

// Planar cross-sections of graspable objects and the slot they are lowered
// into. Units are millimetres and degrees throughout; x runs across the gap,
// y along it, and rotations are counterclockwise about the vertical axis.

enum class ShapeKind {
  kCircle,
  kRectangle,
  kEllipse,
  kHexagon,
  kRoundedRectangle,
};

const char* shape_kind_name(ShapeKind kind);
ShapeKind shape_kind_from_name(const std::string& name);

// Parametric description of a cross-section. Dimensions are full extents:
//   circle:            radius
//   rectangle:         width (x) x length (y)
//   ellipse:           minor_width (x) x major_length (y)
//   hexagon:           circumradius (regular, two corners on the x axis)
//   rounded_rectangle: width x length x corner_radius
struct ShapeSpec {
  ShapeKind kind = ShapeKind::kRectangle;
  double width = 51.0;          // full x extent at zero rotation
  double length = 80.0;         // full y extent (unused for circle/hexagon)
  double corner_radius = 0.0;   // rounded rectangle only

  static ShapeSpec circle(double radius);
  static ShapeSpec rectangle(double width, double length);
  static ShapeSpec ellipse(double minor_width, double major_length);
  static ShapeSpec hexagon(double circumradius);
  static ShapeSpec rounded_rectangle(double width, double length, double corner_radius);

  // Throws std::invalid_argument naming the offending parameter.
  void validate() const;

  // Nominal footprint width across the gap at zero rotation.
  double nominal_width() const;
};

// Convex counterclockwise polygon with its area centroid at the origin.
struct CrossSection {
  std::vector<Vec2> vertices;
};

struct GapEnvironment {
  double gap_width = 56.0;
  double block_top_z = 50.0;
  double block_extent_x = 45.0;
  double block_extent_y = 155.0;
  double target_depth = 20.0;

  void validate() const;
};

// In-plane placement error of the grasped object relative to the gap centre.
struct ErrorState {
  double dx = 0.0;      // mm across the gap
  double dtheta = 0.0;  // deg about vertical
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Discretises the spec into a convex CCW polygon, centroid at the origin.
// vertex_count controls curved-boundary sampling; rectangles always use the
// 4 corners and hexagons their 6 corners. Sampled vertices lie on the true
// boundary, so refining the count can only widen the footprint.
CrossSection make_cross_section(const ShapeSpec& spec, int vertex_count = 64);

// x extent [min, max] of the cross-section rotated by dtheta about its centroid.
Interval rotated_footprint_interval(const CrossSection& section, double dtheta_deg);

// True iff the rotated, translated footprint lies strictly inside the gap.
bool fits_gap(const CrossSection& section, const ErrorState& error, const GapEnvironment& env);

double polygon_area(const CrossSection& section);

}  // namespace tactile_pack

#include "tactile_pack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tactile_pack {

const char* shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kCircle: return "circle";
    case ShapeKind::kRectangle: return "rectangle";
    case ShapeKind::kEllipse: return "ellipse";
    case ShapeKind::kHexagon: return "hexagon";
    case ShapeKind::kRoundedRectangle: return "rounded_rectangle";
  }
  return "unknown";
}

ShapeKind shape_kind_from_name(const std::string& name) {
  if (name == "circle") return ShapeKind::kCircle;
  if (name == "rectangle") return ShapeKind::kRectangle;
  if (name == "ellipse") return ShapeKind::kEllipse;
  if (name == "hexagon") return ShapeKind::kHexagon;
  if (name == "rounded_rectangle") return ShapeKind::kRoundedRectangle;
  throw std::invalid_argument("unknown shape kind: " + name);
}

ShapeSpec ShapeSpec::circle(double radius) {
  ShapeSpec s;
  s.kind = ShapeKind::kCircle;
  s.width = 2.0 * radius;
  s.length = 2.0 * radius;
  return s;
}

ShapeSpec ShapeSpec::rectangle(double width, double length) {
  ShapeSpec s;
  s.kind = ShapeKind::kRectangle;
  s.width = width;
  s.length = length;
  return s;
}

ShapeSpec ShapeSpec::ellipse(double minor_width, double major_length) {
  ShapeSpec s;
  s.kind = ShapeKind::kEllipse;
  s.width = minor_width;
  s.length = major_length;
  return s;
}

ShapeSpec ShapeSpec::hexagon(double circumradius) {
  ShapeSpec s;
  s.kind = ShapeKind::kHexagon;
  s.width = 2.0 * circumradius;
  s.length = std::sqrt(3.0) * circumradius;
  return s;
}

ShapeSpec ShapeSpec::rounded_rectangle(double width, double length, double corner_radius) {
  ShapeSpec s;
  s.kind = ShapeKind::kRoundedRectangle;
  s.width = width;
  s.length = length;
  s.corner_radius = corner_radius;
  return s;
}

void ShapeSpec::validate() const {
  if (!(width > 0.0)) throw std::invalid_argument("shape width must be positive");
  if (!(length > 0.0)) throw std::invalid_argument("shape length must be positive");
  if (kind == ShapeKind::kRectangle || kind == ShapeKind::kEllipse ||
      kind == ShapeKind::kRoundedRectangle) {
    if (width > length) {
      throw std::invalid_argument("shape width must not exceed length");
    }
  }
  if (kind == ShapeKind::kRoundedRectangle) {
    if (!(corner_radius > 0.0)) {
      throw std::invalid_argument("rounded rectangle corner_radius must be positive");
    }
    if (corner_radius > 0.5 * width) {
      throw std::invalid_argument("rounded rectangle corner_radius must not exceed width/2");
    }
  }
}

double ShapeSpec::nominal_width() const { return width; }

void GapEnvironment::validate() const {
  if (!(gap_width > 0.0)) throw std::invalid_argument("gap_width must be positive");
  if (!(block_extent_x > 0.0) || !(block_extent_y > 0.0)) {
    throw std::invalid_argument("block extents must be positive");
  }
  if (!(target_depth > 0.0)) throw std::invalid_argument("target_depth must be positive");
}

double polygon_area(const CrossSection& section) {
  const auto& v = section.vertices;
  double twice = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

namespace {

// Area centroid of a simple polygon.
Vec2 polygon_centroid(const std::vector<Vec2>& v) {
  double twice_area = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const double cross = a.x * b.y - b.x * a.y;
    twice_area += cross;
    cx += (a.x + b.x) * cross;
    cy += (a.y + b.y) * cross;
  }
  const double area = 0.5 * twice_area;
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

CrossSection finish(std::vector<Vec2> vertices) {
  const Vec2 c = polygon_centroid(vertices);
  for (auto& p : vertices) p = p - c;
  return CrossSection{std::move(vertices)};
}

std::vector<Vec2> sample_ellipse(double half_w, double half_l, int n) {
  std::vector<Vec2> v;
  v.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    v.push_back({half_w * std::cos(t), half_l * std::sin(t)});
  }
  return v;
}

std::vector<Vec2> sample_rounded_rectangle(double half_w, double half_l, double r, int n) {
  // Quarter arcs around the four inset corner centres, CCW starting at the
  // (+x,+y) corner. Straight edges fall out of consecutive arc endpoints.
  const int per_arc = std::max(2, n / 4);
  const Vec2 centres[4] = {
      {half_w - r, half_l - r},
      {-(half_w - r), half_l - r},
      {-(half_w - r), -(half_l - r)},
      {half_w - r, -(half_l - r)},
  };
  std::vector<Vec2> v;
  v.reserve(4 * per_arc);
  for (int corner = 0; corner < 4; ++corner) {
    const double start = 90.0 * corner;
    for (int k = 0; k < per_arc; ++k) {
      const double a = deg_to_rad(start + 90.0 * k / (per_arc - 1));
      v.push_back({centres[corner].x + r * std::cos(a), centres[corner].y + r * std::sin(a)});
    }
  }
  return v;
}

}  // namespace

CrossSection make_cross_section(const ShapeSpec& spec, int vertex_count) {
  spec.validate();
  if (vertex_count < 3) throw std::invalid_argument("vertex_count must be at least 3");

  const double half_w = 0.5 * spec.width;
  const double half_l = 0.5 * spec.length;
  switch (spec.kind) {
    case ShapeKind::kRectangle:
      return finish({{half_w, half_l}, {-half_w, half_l}, {-half_w, -half_l}, {half_w, -half_l}});
    case ShapeKind::kHexagon: {
      std::vector<Vec2> v;
      const double radius = half_w;
      for (int k = 0; k < 6; ++k) {
        const double a = deg_to_rad(60.0 * k);
        v.push_back({radius * std::cos(a), radius * std::sin(a)});
      }
      return finish(std::move(v));
    }
    case ShapeKind::kCircle:
    case ShapeKind::kEllipse:
      return finish(sample_ellipse(half_w, half_l, vertex_count));
    case ShapeKind::kRoundedRectangle:
      return finish(sample_rounded_rectangle(half_w, half_l, spec.corner_radius, vertex_count));
  }
  throw std::invalid_argument("unknown shape kind");
}

Interval rotated_footprint_interval(const CrossSection& section, double dtheta_deg) {
  if (section.vertices.size() < 3) {
    throw std::invalid_argument("cross-section must have at least 3 vertices");
  }
  const double a = deg_to_rad(dtheta_deg);
  const double c = std::cos(a);
  const double s = std::sin(a);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : section.vertices) {
    const double x = c * v.x - s * v.y;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

bool fits_gap(const CrossSection& section, const ErrorState& error, const GapEnvironment& env) {
  env.validate();
  const Interval span = rotated_footprint_interval(section, error.dtheta);
  const double half_gap = 0.5 * env.gap_width;
  return span.lo + error.dx > -half_gap && span.hi + error.dx < half_gap;
}

}  // namespace tactile_pack

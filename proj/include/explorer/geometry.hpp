#pragma once

#include <cmath>
#include <span>
#include <variant>
#include <vector>

namespace explorer {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Box {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  bool overlaps(const Box& o) const {
    return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
  }
};

struct Disk {
  Vec2 center;
  double radius = 0.0;
};

/// Simple polygon, counterclockwise. Obstacles may be concave; robot bodies
/// are required to be convex.
struct Polygon {
  std::vector<Vec2> points;
};

/// A shape placed in the workspace.
using PlacedShape = std::variant<Disk, Polygon>;

/// Normalize an angle into [-pi, pi).
double wrap_angle(double a);

double signed_area(std::span<const Vec2> poly);
bool is_simple(std::span<const Vec2> poly);
bool is_convex(std::span<const Vec2> poly);

/// Closed segment intersection (touching counts).
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
/// Point inside or on the boundary of a simple polygon.
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

Box bounding_box(const PlacedShape& shape);

/// Closed-set intersection test: touching boundaries count as intersecting.
bool intersects(const PlacedShape& a, const PlacedShape& b);

/// True iff any part of the shape touches or leaves the box.
bool leaves_box(const PlacedShape& shape, const Box& box);

}  // namespace explorer

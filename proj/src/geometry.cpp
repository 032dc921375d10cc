#include "explorer/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace explorer {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= std::numbers::pi;
  // fmod rounding can land exactly on +pi
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

double signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool disk_polygon(const Disk& d, const Polygon& p) {
  if (point_in_polygon(d.center, p.points)) return true;
  const auto& pts = p.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (point_segment_distance(d.center, pts[i], pts[(i + 1) % pts.size()]) <= d.radius) return true;
  }
  return false;
}

bool polygon_polygon(const Polygon& a, const Polygon& b) {
  const auto& pa = a.points;
  const auto& pb = b.points;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const Vec2 a0 = pa[i];
    const Vec2 a1 = pa[(i + 1) % pa.size()];
    for (std::size_t j = 0; j < pb.size(); ++j) {
      if (segments_intersect(a0, a1, pb[j], pb[(j + 1) % pb.size()])) return true;
    }
  }
  // no boundary crossing: either disjoint or one contains the other
  return point_in_polygon(pa.front(), pb) || point_in_polygon(pb.front(), pa);
}

}  // namespace

bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a0 = poly[i];
    const Vec2 a1 = poly[(i + 1) % n];
    if (a0 == a1) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex by construction
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a0, a1, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return std::abs(signed_area(poly)) > 0.0;
}

bool is_convex(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int o = orientation(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
    if (o == 0) continue;
    if (sign == 0) sign = o;
    if (o != sign) return false;
  }
  return sign != 0;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[j];
    const Vec2 b = poly[i];
    if (orientation(a, b, p) == 0 && on_segment(a, b, p)) return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Box bounding_box(const PlacedShape& shape) {
  if (const auto* d = std::get_if<Disk>(&shape)) {
    return {{d->center.x - d->radius, d->center.y - d->radius},
            {d->center.x + d->radius, d->center.y + d->radius}};
  }
  const auto& pts = std::get<Polygon>(shape).points;
  Box box{pts.front(), pts.front()};
  for (const Vec2 p : pts) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

bool intersects(const PlacedShape& a, const PlacedShape& b) {
  if (!bounding_box(a).overlaps(bounding_box(b))) return false;
  const auto* da = std::get_if<Disk>(&a);
  const auto* db = std::get_if<Disk>(&b);
  if (da && db) return norm(da->center - db->center) <= da->radius + db->radius;
  if (da) return disk_polygon(*da, std::get<Polygon>(b));
  if (db) return disk_polygon(*db, std::get<Polygon>(a));
  return polygon_polygon(std::get<Polygon>(a), std::get<Polygon>(b));
}

bool leaves_box(const PlacedShape& shape, const Box& box) {
  const Box b = bounding_box(shape);
  return b.min.x <= box.min.x || b.min.y <= box.min.y || b.max.x >= box.max.x ||
         b.max.y >= box.max.y;
}

}  // namespace explorer

#include "explorer/scene.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "explorer/error.hpp"
#include "json_util.hpp"

namespace explorer {

using nlohmann::json;

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Segment: return "R1";
    case SpaceKind::Plane: return "R2";
    case SpaceKind::Rigid: return "SE2";
    case SpaceKind::Empty: return "Empty";
  }
  return "?";
}

int dimension_of(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Segment: return 1;
    case SpaceKind::Plane: return 2;
    case SpaceKind::Rigid: return 3;
    case SpaceKind::Empty: return 0;
  }
  return 0;
}

double BodyShape::bounding_radius() const {
  if (kind == Kind::Disk) return radius;
  double r = 0.0;
  for (const Vec2 p : points) r = std::max(r, norm(p));
  return r;
}

double BodyShape::inscribed_radius() const {
  if (kind == Kind::Disk) return radius;
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    r = std::min(r, point_segment_distance({0.0, 0.0}, points[i], points[(i + 1) % points.size()]));
  }
  if (!point_in_polygon({0.0, 0.0}, points)) return 0.0;
  return r;
}

BodyShape BodyShape::inflated(double margin) const {
  if (kind == Kind::Disk) return disk(radius + margin);
  const std::size_t n = points.size();
  std::vector<Vec2> normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = points[(i + 1) % n] - points[i];
    normals[i] = (1.0 / norm(e)) * Vec2{e.y, -e.x};
  }
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = normals[(i + n - 1) % n];
    const Vec2 b = normals[i];
    out[i] = points[i] + (margin / (1.0 + dot(a, b))) * (a + b);
  }
  return polygon(std::move(out));
}

PlacedShape BodyShape::place(Vec2 position, double theta) const {
  if (kind == Kind::Disk) return Disk{position, radius};
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Polygon out;
  out.points.reserve(points.size());
  for (const Vec2 p : points) {
    out.points.push_back({position.x + c * p.x - s * p.y, position.y + s * p.x + c * p.y});
  }
  return out;
}

std::pair<Vec2, double> RobotSpec::workspace_pose(std::span<const double> pose) const {
  switch (space) {
    case SpaceKind::Segment:
      return {segment_from + pose[0] * (segment_to - segment_from), 0.0};
    case SpaceKind::Plane:
      return {{pose[0], pose[1]}, 0.0};
    case SpaceKind::Rigid:
      return {{pose[0], pose[1]}, pose[2]};
    case SpaceKind::Empty:
      break;
  }
  return {{}, 0.0};
}

int Scene::robot_index(std::string_view n) const {
  for (std::size_t i = 0; i < robots.size(); ++i) {
    if (robots[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

int Scene::composite_dimension() const {
  int n = 0;
  for (const auto& r : robots) n += dimension_of(r.space);
  return n;
}

bool shape_in_collision(const Scene& scene, const PlacedShape& shape) {
  if (leaves_box(shape, scene.workspace.bounds)) return true;
  const Box box = bounding_box(shape);
  for (const auto& obstacle : scene.workspace.obstacles) {
    if (!box.overlaps(obstacle.box)) continue;
    if (intersects(shape, obstacle.shape)) return true;
  }
  return false;
}

bool robot_in_collision(const Scene& scene, int robot, const BodyShape& body,
                        std::span<const double> pose) {
  const auto [pos, theta] = scene.robots[robot].workspace_pose(pose);
  return shape_in_collision(scene, body.place(pos, theta));
}

bool robot_in_collision(const Scene& scene, int robot, std::span<const double> pose) {
  return robot_in_collision(scene, robot, scene.robots[robot].shape, pose);
}

bool robots_in_collision(const Scene& scene, int i, std::span<const double> pose_i, int j,
                         std::span<const double> pose_j) {
  const auto& ri = scene.robots[i];
  const auto& rj = scene.robots[j];
  const auto [pi, ti] = ri.workspace_pose(pose_i);
  const auto [pj, tj] = rj.workspace_pose(pose_j);
  return intersects(ri.shape.place(pi, ti), rj.shape.place(pj, tj));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec2 vec2_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::Schema, field + ": expected [x, y]", field);
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_to(Vec2 v) { return json::array({v.x, v.y}); }

std::vector<Vec2> points_from(const json& j, const std::string& field) {
  if (!j.is_array()) throw Error(ErrorKind::Schema, field + ": expected point list", field);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < j.size(); ++i) {
    pts.push_back(vec2_from(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return pts;
}

json points_to(const std::vector<Vec2>& pts) {
  json out = json::array();
  for (const Vec2 p : pts) out.push_back(vec2_to(p));
  return out;
}

std::vector<Vec2> counterclockwise(std::vector<Vec2> pts) {
  if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
  return pts;
}

Obstacle obstacle_from(const json& j, const std::string& field) {
  const std::string type = detail::require_string(j, "type", field);
  Obstacle o;
  if (type == "polygon") {
    auto pts = points_from(detail::require(j, "points", field), field + ".points");
    if (pts.size() < 3) {
      throw Error(ErrorKind::Validation, field + ": polygon needs at least 3 vertices", field);
    }
    if (!is_simple(pts)) {
      throw Error(ErrorKind::Validation, field + ": polygon is not simple", field);
    }
    o.shape = Polygon{counterclockwise(std::move(pts))};
  } else if (type == "disk") {
    const Vec2 c = vec2_from(detail::require(j, "center", field), field + ".center");
    const double r = detail::require_number(j, "radius", field);
    if (!(r > 0.0)) throw Error(ErrorKind::Validation, field + ": radius must be > 0", field);
    o.shape = Disk{c, r};
  } else {
    throw Error(ErrorKind::Schema, field + ": unknown obstacle type '" + type + "'", field);
  }
  o.box = bounding_box(o.shape);
  return o;
}

}  // namespace

BodyShape shape_from_json(const json& j, const std::string& field) {
  const std::string type = detail::require_string(j, "type", field);
  if (type == "disk") {
    const double r = detail::require_number(j, "radius", field);
    if (!(r > 0.0)) throw Error(ErrorKind::Validation, field + ": radius must be > 0", field);
    return BodyShape::disk(r);
  }
  if (type == "polygon") {
    auto pts = points_from(detail::require(j, "points", field), field + ".points");
    if (pts.size() < 3) {
      throw Error(ErrorKind::Validation, field + ": polygon needs at least 3 vertices", field);
    }
    if (!is_convex(pts)) {
      throw Error(ErrorKind::Validation, field + ": robot polygon must be convex", field);
    }
    return BodyShape::polygon(counterclockwise(std::move(pts)));
  }
  throw Error(ErrorKind::Schema, field + ": unknown shape type '" + type + "'", field);
}

json shape_to_json(const BodyShape& shape) {
  if (shape.kind == BodyShape::Kind::Disk) return {{"type", "disk"}, {"radius", shape.radius}};
  return {{"type", "polygon"}, {"points", points_to(shape.points)}};
}

Scene load_scene(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Schema, "scene: expected an object", "scene");
  Scene scene;
  scene.name = doc.contains("name") ? detail::require_string(doc, "name", "scene") : "scene";

  const json& ws = detail::require(doc, "workspace", "scene");
  const json& bounds = detail::require(ws, "bounds", "workspace");
  if (!bounds.is_array() || bounds.size() != 2) {
    throw Error(ErrorKind::Schema, "workspace.bounds: expected [[xmin, ymin], [xmax, ymax]]",
                "workspace.bounds");
  }
  scene.workspace.bounds = {vec2_from(bounds[0], "workspace.bounds[0]"),
                            vec2_from(bounds[1], "workspace.bounds[1]")};
  const Box& box = scene.workspace.bounds;
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw Error(ErrorKind::Validation, "workspace.bounds: width and height must be positive",
                "workspace.bounds");
  }
  if (ws.contains("obstacles")) {
    const json& obs = ws.at("obstacles");
    if (!obs.is_array()) {
      throw Error(ErrorKind::Schema, "workspace.obstacles: expected a list", "workspace.obstacles");
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string field = "workspace.obstacles[" + std::to_string(i) + "]";
      Obstacle o = obstacle_from(obs[i], field);
      if (o.box.min.x < box.min.x || o.box.min.y < box.min.y || o.box.max.x > box.max.x ||
          o.box.max.y > box.max.y) {
        throw Error(ErrorKind::Validation, field + ": obstacle extends beyond bounds", field);
      }
      scene.workspace.obstacles.push_back(std::move(o));
    }
  }

  const json& robots = detail::require(doc, "robots", "scene");
  if (!robots.is_array() || robots.empty()) {
    throw Error(ErrorKind::Schema, "robots: expected a non-empty list", "robots");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const json& rj = robots[i];
    const std::string field = "robots[" + std::to_string(i) + "]";
    RobotSpec r;
    r.name = detail::require_string(rj, "name", field);
    if (!names.insert(r.name).second) {
      throw Error(ErrorKind::Validation, field + ".name: duplicate robot name '" + r.name + "'",
                  field + ".name");
    }
    r.shape = shape_from_json(detail::require(rj, "shape", field), field + ".shape");

    const json& space = detail::require(rj, "space", field);
    if (space.is_string()) {
      const auto s = space.get<std::string>();
      if (s == "R2") {
        r.space = SpaceKind::Plane;
      } else if (s == "SE2") {
        r.space = SpaceKind::Rigid;
      } else {
        throw Error(ErrorKind::Schema, field + ".space: unknown space '" + s + "'", field + ".space");
      }
    } else {
      const std::string type = detail::require_string(space, "type", field + ".space");
      if (type != "R1") {
        throw Error(ErrorKind::Schema, field + ".space: unknown space '" + type + "'",
                    field + ".space");
      }
      r.space = SpaceKind::Segment;
      r.segment_from = vec2_from(detail::require(space, "from", field + ".space"), field + ".space.from");
      r.segment_to = vec2_from(detail::require(space, "to", field + ".space"), field + ".space.to");
      if (r.segment_from == r.segment_to) {
        throw Error(ErrorKind::Validation, field + ".space: segment endpoints must differ",
                    field + ".space");
      }
    }

    const auto dim = static_cast<std::size_t>(dimension_of(r.space));
    for (const char* key : {"start", "goal"}) {
      const json& c = detail::require(rj, key, field);
      const std::string cf = field + "." + key;
      if (!c.is_array() || c.size() != dim) {
        throw Error(ErrorKind::Schema, cf + ": expected " + std::to_string(dim) + " coordinates", cf);
      }
      std::vector<double> v;
      for (const auto& x : c) {
        if (!x.is_number()) throw Error(ErrorKind::Schema, cf + ": coordinates must be numbers", cf);
        v.push_back(x.get<double>());
      }
      if (r.space == SpaceKind::Rigid) v[2] = wrap_angle(v[2]);
      if (r.space == SpaceKind::Segment && (v[0] < 0.0 || v[0] > 1.0)) {
        throw Error(ErrorKind::Validation, cf + ": segment parameter must lie in [0, 1]", cf);
      }
      (std::string(key) == "start" ? r.start : r.goal) = std::move(v);
    }
    scene.robots.push_back(std::move(r));
  }

  for (std::size_t i = 0; i < scene.robots.size(); ++i) {
    const std::string field = "robots[" + std::to_string(i) + "]";
    const int ri = static_cast<int>(i);
    if (robot_in_collision(scene, ri, scene.robots[i].start)) {
      throw Error(ErrorKind::Validation, field + ".start: in collision", field + ".start");
    }
    if (robot_in_collision(scene, ri, scene.robots[i].goal)) {
      throw Error(ErrorKind::Validation, field + ".goal: in collision", field + ".goal");
    }
    for (std::size_t j = i + 1; j < scene.robots.size(); ++j) {
      const int rj = static_cast<int>(j);
      if (robots_in_collision(scene, ri, scene.robots[i].start, rj, scene.robots[j].start)) {
        throw Error(ErrorKind::Validation,
                    field + ".start: collides with robot '" + scene.robots[j].name + "'",
                    field + ".start");
      }
      if (robots_in_collision(scene, ri, scene.robots[i].goal, rj, scene.robots[j].goal)) {
        throw Error(ErrorKind::Validation,
                    field + ".goal: collides with robot '" + scene.robots[j].name + "'",
                    field + ".goal");
      }
    }
  }
  return scene;
}

Scene parse_scene(std::string_view text) {
  return load_scene(detail::parse(text, "scene"));
}

json scene_to_json(const Scene& scene) {
  json obstacles = json::array();
  for (const auto& o : scene.workspace.obstacles) {
    if (const auto* d = std::get_if<Disk>(&o.shape)) {
      obstacles.push_back({{"type", "disk"}, {"center", vec2_to(d->center)}, {"radius", d->radius}});
    } else {
      obstacles.push_back({{"type", "polygon"}, {"points", points_to(std::get<Polygon>(o.shape).points)}});
    }
  }
  json robots = json::array();
  for (const auto& r : scene.robots) {
    json space;
    if (r.space == SpaceKind::Segment) {
      space = {{"type", "R1"}, {"from", vec2_to(r.segment_from)}, {"to", vec2_to(r.segment_to)}};
    } else {
      space = to_string(r.space);
    }
    robots.push_back({{"name", r.name},
                      {"shape", shape_to_json(r.shape)},
                      {"space", space},
                      {"start", r.start},
                      {"goal", r.goal}});
  }
  const Box& b = scene.workspace.bounds;
  return {{"name", scene.name},
          {"workspace",
           {{"bounds", json::array({vec2_to(b.min), vec2_to(b.max)})}, {"obstacles", obstacles}}},
          {"robots", robots}};
}

}  // namespace explorer

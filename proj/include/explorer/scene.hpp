#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "explorer/geometry.hpp"
#include "json.hpp"

namespace explorer {

/// How a single robot moves: a parameter t in [0,1] along a fixed workspace
/// segment, a free translation, or a free rigid-body motion in the plane.
enum class SpaceKind { Segment, Plane, Rigid, Empty };

const char* to_string(SpaceKind kind);
int dimension_of(SpaceKind kind);

/// Robot body in its local frame.
struct BodyShape {
  enum class Kind { Disk, Polygon };

  Kind kind = Kind::Disk;
  double radius = 0.0;
  std::vector<Vec2> points;  // convex, counterclockwise

  static BodyShape disk(double r) { return {Kind::Disk, r, {}}; }
  static BodyShape polygon(std::vector<Vec2> pts) { return {Kind::Polygon, 0.0, std::move(pts)}; }

  /// Radius of the smallest origin-centered disk containing the body.
  double bounding_radius() const;
  /// Radius of the largest origin-centered disk contained in the body.
  double inscribed_radius() const;
  PlacedShape place(Vec2 position, double theta) const;
  /// Body grown by `margin` in every direction (mitered for polygons, so it
  /// contains the exact offset).
  BodyShape inflated(double margin) const;

  friend bool operator==(const BodyShape&, const BodyShape&) = default;
};

struct RobotSpec {
  std::string name;
  BodyShape shape;
  SpaceKind space = SpaceKind::Plane;
  Vec2 segment_from;  // Segment robots only
  Vec2 segment_to;
  std::vector<double> start;
  std::vector<double> goal;

  /// Workspace position and heading of the robot at a component pose.
  std::pair<Vec2, double> workspace_pose(std::span<const double> pose) const;
};

struct Obstacle {
  PlacedShape shape;
  Box box;
};

struct Workspace {
  Box bounds;
  std::vector<Obstacle> obstacles;
};

/// Immutable after loading.
struct Scene {
  std::string name;
  Workspace workspace;
  std::vector<RobotSpec> robots;

  int robot_index(std::string_view name) const;  // -1 if absent
  int composite_dimension() const;
};

/// True iff the placed shape touches an obstacle or reaches the workspace
/// boundary.
bool shape_in_collision(const Scene& scene, const PlacedShape& shape);

bool robot_in_collision(const Scene& scene, int robot, std::span<const double> pose);
/// Same test with a substitute body, e.g. a simplified shape on a base level.
bool robot_in_collision(const Scene& scene, int robot, const BodyShape& body,
                        std::span<const double> pose);

bool robots_in_collision(const Scene& scene, int i, std::span<const double> pose_i, int j,
                         std::span<const double> pose_j);

Scene load_scene(const nlohmann::json& doc);
Scene parse_scene(std::string_view text);
nlohmann::json scene_to_json(const Scene& scene);

nlohmann::json shape_to_json(const BodyShape& shape);
BodyShape shape_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace explorer

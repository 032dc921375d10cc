#pragma once

#include <memory>
#include <span>
#include <vector>

#include "explorer/rng.hpp"
#include "explorer/scene.hpp"
#include "json.hpp"

namespace explorer {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Configuration space of one robot on one level.
struct ComponentSpace {
  SpaceKind kind = SpaceKind::Empty;
  int robot = -1;
  BodyShape shape;
  std::vector<Interval> bounds;
  double angle_weight = 0.0;  // Rigid only
  Vec2 segment_from;          // Segment only
  Vec2 segment_to;

  int dimension() const { return dimension_of(kind); }
  /// Diameter of the component under its metric.
  double extent() const;
  std::pair<Vec2, double> workspace_pose(std::span<const double> block) const;
  PlacedShape placed(std::span<const double> block) const;

  /// Space of `robot` in `scene` with the given kind and body. Translational
  /// bounds are the workspace shrunk by the body's bounding radius.
  static ComponentSpace for_robot(const Scene& scene, int robot, SpaceKind kind, BodyShape body);
  static ComponentSpace plane(Interval x, Interval y);
};

/// Point of a composite space: per-component coordinate blocks laid out
/// back to back in component order.
class Config {
 public:
  Config() = default;
  explicit Config(std::vector<double> coords) : coords_(std::move(coords)) {}
  explicit Config(std::size_t n) : coords_(n, 0.0) {}
  Config(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> values() const { return coords_; }
  std::span<double> values() { return coords_; }
  const std::vector<double>& vector() const { return coords_; }

  friend bool operator==(const Config&, const Config&) = default;
  friend auto operator<=>(const Config&, const Config&) = default;

 private:
  std::vector<double> coords_;
};

/// Product of the component spaces of the robots active on one level.
/// Immutable after construction.
class CompositeSpace {
 public:
  /// Resolution is `resolution_fraction` times `scale`, or times this
  /// space's own measure when `scale` is 0.
  CompositeSpace(std::shared_ptr<const Scene> scene, std::vector<ComponentSpace> components,
                 double resolution_fraction = 0.01, double scale = 0.0);

  const Scene& scene() const { return *scene_; }
  const std::shared_ptr<const Scene>& scene_ptr() const { return scene_; }
  std::span<const ComponentSpace> components() const { return components_; }
  int dimension() const { return dimension_; }
  std::size_t offset(std::size_t component) const { return offsets_[component]; }
  std::vector<int> active_robots() const;
  /// Component index of a scene robot, -1 if inactive here.
  int component_of(int robot) const;

  std::span<const double> block(const Config& x, std::size_t component) const;
  std::span<double> block(Config& x, std::size_t component) const;

  /// Scene start/goal restricted to the components of this space.
  Config start() const;
  Config goal() const;

  Config sample_uniform(Rng& rng) const;
  double distance(const Config& a, const Config& b) const;
  Config interpolate(const Config& a, const Config& b, double t) const;
  /// Uniform point in the metric ball of `radius` around x, clamped.
  Config perturb(const Config& x, double radius, Rng& rng) const;
  Config clamp(Config x) const;
  bool contains(const Config& x) const;

  bool is_config_feasible(const Config& x) const;
  /// Endpoint-inclusive discretized check at `resolution()`.
  bool is_segment_feasible(const Config& a, const Config& b) const;
  /// Same check without the endpoints.
  bool is_interior_feasible(const Config& a, const Config& b) const;

  /// Feasibility with every body grown by `clearance()`. Points on a segment
  /// whose checked points are all clear are themselves feasible.
  bool is_config_clear(const Config& x) const;
  bool is_segment_clear(const Config& a, const Config& b) const;
  /// Half the largest workspace displacement of any body point between two
  /// checked points of a segment.
  double clearance() const { return clearance_; }

  /// Diameter of the space; scales all radii.
  double measure() const { return measure_; }
  double resolution() const { return resolution_; }

  nlohmann::json layout() const;

 private:
  std::shared_ptr<const Scene> scene_;
  std::vector<ComponentSpace> components_;
  std::vector<std::size_t> offsets_;
  int dimension_ = 0;
  double measure_ = 0.0;
  double resolution_ = 0.0;
  double clearance_ = 0.0;
  std::vector<BodyShape> clear_shapes_;

  bool feasible_with(const Config& x, bool clear) const;
};

nlohmann::json config_to_json(const Config& x);
Config config_from_json(const CompositeSpace& space, const nlohmann::json& j);

}  // namespace explorer

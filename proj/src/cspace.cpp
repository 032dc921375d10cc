#include "explorer/cspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "explorer/error.hpp"

namespace explorer {

using nlohmann::json;

double ComponentSpace::extent() const {
  switch (kind) {
    case SpaceKind::Segment:
      return bounds[0].length();
    case SpaceKind::Plane:
      return std::hypot(bounds[0].length(), bounds[1].length());
    case SpaceKind::Rigid: {
      const double a = angle_weight * std::numbers::pi;
      return std::sqrt(bounds[0].length() * bounds[0].length() +
                       bounds[1].length() * bounds[1].length() + a * a);
    }
    case SpaceKind::Empty:
      break;
  }
  return 0.0;
}

std::pair<Vec2, double> ComponentSpace::workspace_pose(std::span<const double> block) const {
  switch (kind) {
    case SpaceKind::Segment:
      return {segment_from + block[0] * (segment_to - segment_from), 0.0};
    case SpaceKind::Plane:
      return {{block[0], block[1]}, 0.0};
    case SpaceKind::Rigid:
      return {{block[0], block[1]}, block[2]};
    case SpaceKind::Empty:
      break;
  }
  return {{}, 0.0};
}

PlacedShape ComponentSpace::placed(std::span<const double> block) const {
  const auto [pos, theta] = workspace_pose(block);
  return shape.place(pos, theta);
}

ComponentSpace ComponentSpace::for_robot(const Scene& scene, int robot, SpaceKind kind,
                                         BodyShape body) {
  const RobotSpec& spec = scene.robots[robot];
  ComponentSpace c;
  c.kind = kind;
  c.robot = robot;
  c.shape = std::move(body);
  const Box& ws = scene.workspace.bounds;
  const double r = c.shape.bounding_radius();
  const Interval x{ws.min.x + r, ws.max.x - r};
  const Interval y{ws.min.y + r, ws.max.y - r};
  switch (kind) {
    case SpaceKind::Segment:
      c.bounds = {{0.0, 1.0}};
      c.segment_from = spec.segment_from;
      c.segment_to = spec.segment_to;
      break;
    case SpaceKind::Plane:
      c.bounds = {x, y};
      break;
    case SpaceKind::Rigid:
      c.bounds = {x, y, {-std::numbers::pi, std::numbers::pi}};
      c.angle_weight = r;
      break;
    case SpaceKind::Empty:
      break;
  }
  return c;
}

ComponentSpace ComponentSpace::plane(Interval x, Interval y) {
  ComponentSpace c;
  c.kind = SpaceKind::Plane;
  c.bounds = {x, y};
  return c;
}

CompositeSpace::CompositeSpace(std::shared_ptr<const Scene> scene,
                               std::vector<ComponentSpace> components, double resolution_fraction,
                               double scale)
    : scene_(std::move(scene)), components_(std::move(components)) {
  double m2 = 0.0;
  for (const auto& c : components_) {
    offsets_.push_back(static_cast<std::size_t>(dimension_));
    dimension_ += c.dimension();
    m2 += c.extent() * c.extent();
  }
  measure_ = std::sqrt(m2);
  resolution_ = resolution_fraction * (scale > 0.0 ? scale : measure_);
  double sweep = 0.0;
  for (const auto& c : components_) {
    switch (c.kind) {
      case SpaceKind::Segment: sweep = std::max(sweep, norm(c.segment_to - c.segment_from)); break;
      case SpaceKind::Plane: sweep = std::max(sweep, 1.0); break;
      case SpaceKind::Rigid: sweep = std::max(sweep, std::sqrt(2.0)); break;
      case SpaceKind::Empty: break;
    }
  }
  clearance_ = 0.505 * resolution_ * sweep;
  for (const auto& c : components_) clear_shapes_.push_back(c.shape.inflated(clearance_));
}

std::vector<int> CompositeSpace::active_robots() const {
  std::vector<int> out;
  for (const auto& c : components_) out.push_back(c.robot);
  return out;
}

int CompositeSpace::component_of(int robot) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].robot == robot) return static_cast<int>(i);
  }
  return -1;
}

std::span<const double> CompositeSpace::block(const Config& x, std::size_t c) const {
  return x.values().subspan(offsets_[c], static_cast<std::size_t>(components_[c].dimension()));
}

std::span<double> CompositeSpace::block(Config& x, std::size_t c) const {
  return x.values().subspan(offsets_[c], static_cast<std::size_t>(components_[c].dimension()));
}

namespace {

Config scene_config(const CompositeSpace& space, bool goal) {
  Config x(static_cast<std::size_t>(space.dimension()));
  for (std::size_t c = 0; c < space.components().size(); ++c) {
    const auto& comp = space.components()[c];
    const auto& robot = space.scene().robots[comp.robot];
    const auto& src = goal ? robot.goal : robot.start;
    auto dst = space.block(x, c);
    // lower levels keep the leading coordinates of the scene pose
    std::copy_n(src.begin(), dst.size(), dst.begin());
  }
  return x;
}

}  // namespace

Config CompositeSpace::start() const { return scene_config(*this, false); }
Config CompositeSpace::goal() const { return scene_config(*this, true); }

Config CompositeSpace::sample_uniform(Rng& rng) const {
  Config x(static_cast<std::size_t>(dimension_));
  std::size_t i = 0;
  for (const auto& c : components_) {
    for (const auto& b : c.bounds) x[i++] = rng.uniform(b.lo, b.hi);
  }
  return x;
}

double CompositeSpace::distance(const Config& a, const Config& b) const {
  double d2 = 0.0;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    const std::size_t o = offsets_[c];
    switch (comp.kind) {
      case SpaceKind::Segment: {
        const double d = a[o] - b[o];
        d2 += d * d;
        break;
      }
      case SpaceKind::Plane: {
        const double dx = a[o] - b[o];
        const double dy = a[o + 1] - b[o + 1];
        d2 += dx * dx + dy * dy;
        break;
      }
      case SpaceKind::Rigid: {
        const double dx = a[o] - b[o];
        const double dy = a[o + 1] - b[o + 1];
        const double dt = comp.angle_weight * wrap_angle(b[o + 2] - a[o + 2]);
        d2 += dx * dx + dy * dy + dt * dt;
        break;
      }
      case SpaceKind::Empty:
        break;
    }
  }
  return std::sqrt(d2);
}

Config CompositeSpace::interpolate(const Config& a, const Config& b, double t) const {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  Config x(a.size());
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    const std::size_t o = offsets_[c];
    const int n = comp.dimension();
    for (int k = 0; k < n; ++k) {
      const std::size_t i = o + static_cast<std::size_t>(k);
      if (comp.kind == SpaceKind::Rigid && k == 2) {
        x[i] = wrap_angle(a[i] + t * wrap_angle(b[i] - a[i]));
      } else {
        x[i] = (1.0 - t) * a[i] + t * b[i];
      }
    }
  }
  return x;
}

Config CompositeSpace::perturb(const Config& x, double radius, Rng& rng) const {
  if (radius <= 0.0 || dimension_ == 0) return x;
  std::vector<double> dir(static_cast<std::size_t>(dimension_));
  double n2 = 0.0;
  for (double& v : dir) {
    v = rng.normal();
    n2 += v * v;
  }
  const double len = std::sqrt(n2);
  const double r = radius * std::pow(rng.uniform(), 1.0 / dimension_);
  Config y = x;
  if (len == 0.0) return y;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    for (int k = 0; k < comp.dimension(); ++k) {
      const std::size_t i = offsets_[c] + static_cast<std::size_t>(k);
      double step = r * dir[i] / len;
      if (comp.kind == SpaceKind::Rigid && k == 2) step /= comp.angle_weight;
      y[i] += step;
    }
  }
  return clamp(std::move(y));
}

Config CompositeSpace::clamp(Config x) const {
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    for (int k = 0; k < comp.dimension(); ++k) {
      const std::size_t i = offsets_[c] + static_cast<std::size_t>(k);
      if (comp.kind == SpaceKind::Rigid && k == 2) {
        x[i] = wrap_angle(x[i]);
      } else {
        x[i] = std::clamp(x[i], comp.bounds[k].lo, comp.bounds[k].hi);
      }
    }
  }
  return x;
}

bool CompositeSpace::contains(const Config& x) const {
  if (x.size() != static_cast<std::size_t>(dimension_)) return false;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    for (int k = 0; k < comp.dimension(); ++k) {
      const double v = x[offsets_[c] + static_cast<std::size_t>(k)];
      if (!(v >= comp.bounds[k].lo && v <= comp.bounds[k].hi)) return false;
    }
  }
  return true;
}

bool CompositeSpace::feasible_with(const Config& x, bool clear) const {
  thread_local std::vector<PlacedShape> placed;
  placed.clear();
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    const auto [pos, theta] = comp.workspace_pose(block(x, c));
    placed.push_back((clear ? clear_shapes_[c] : comp.shape).place(pos, theta));
    if (shape_in_collision(*scene_, placed.back())) return false;
  }
  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      if (intersects(placed[i], placed[j])) return false;
    }
  }
  return true;
}

bool CompositeSpace::is_config_feasible(const Config& x) const { return feasible_with(x, false); }

bool CompositeSpace::is_config_clear(const Config& x) const { return feasible_with(x, true); }

bool CompositeSpace::is_segment_clear(const Config& a, const Config& b) const {
  const bool swap = b < a;
  const Config& from = swap ? b : a;
  const Config& to = swap ? a : b;
  if (!is_config_clear(from)) return false;
  if (from == to) return true;
  if (!is_config_clear(to)) return false;
  const auto steps = static_cast<std::size_t>(std::ceil(distance(from, to) / resolution_));
  for (std::size_t i = 1; i < steps; ++i) {
    if (!is_config_clear(interpolate(from, to, static_cast<double>(i) / static_cast<double>(steps)))) {
      return false;
    }
  }
  return true;
}

bool CompositeSpace::is_interior_feasible(const Config& a, const Config& b) const {
  const bool swap = b < a;
  const Config& from = swap ? b : a;
  const Config& to = swap ? a : b;
  const auto steps = static_cast<std::size_t>(std::ceil(distance(from, to) / resolution_));
  for (std::size_t i = 1; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    if (!is_config_feasible(interpolate(from, to, t))) return false;
  }
  return true;
}

bool CompositeSpace::is_segment_feasible(const Config& a, const Config& b) const {
  // fixed traversal order keeps the check exactly symmetric in (a, b)
  const bool swap = b < a;
  const Config& from = swap ? b : a;
  const Config& to = swap ? a : b;
  if (!is_config_feasible(from)) return false;
  if (from == to) return true;
  if (!is_config_feasible(to)) return false;
  const double d = distance(from, to);
  const auto steps = static_cast<std::size_t>(std::ceil(d / resolution_));
  for (std::size_t i = 1; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    if (!is_config_feasible(interpolate(from, to, t))) return false;
  }
  return true;
}

json CompositeSpace::layout() const {
  json out = json::array();
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    out.push_back({{"robot", scene_->robots[comp.robot].name},
                   {"space", to_string(comp.kind)},
                   {"offset", offsets_[c]},
                   {"dimension", comp.dimension()}});
  }
  return out;
}

json config_to_json(const Config& x) { return x.vector(); }

Config config_from_json(const CompositeSpace& space, const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Schema, "config: expected a number array", "config");
  if (j.size() != static_cast<std::size_t>(space.dimension())) {
    throw Error(ErrorKind::DimensionMismatch,
                "config: expected " + std::to_string(space.dimension()) + " coordinates, got " +
                    std::to_string(j.size()),
                "config");
  }
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw Error(ErrorKind::Schema, "config: coordinates must be numbers", "config");
    v.push_back(e.get<double>());
  }
  return Config(std::move(v));
}

}  // namespace explorer

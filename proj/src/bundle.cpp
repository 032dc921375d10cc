#include "explorer/bundle.hpp"

#include <algorithm>
#include <numbers>

#include "explorer/error.hpp"
#include "json_util.hpp"

namespace explorer {

using nlohmann::json;

const char* to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::Identity: return "Identity";
    case MappingKind::RemoveRobot: return "RemoveRobot";
    case MappingKind::SE2toR2: return "SE2toR2";
    case MappingKind::RNtoRM: return "RNtoRM";
  }
  return "?";
}

std::vector<double> project_block(MappingKind kind, std::span<const double> upper,
                                  std::size_t base_dim) {
  switch (kind) {
    case MappingKind::Identity:
      return {upper.begin(), upper.end()};
    case MappingKind::RemoveRobot:
      return {};
    case MappingKind::SE2toR2:
    case MappingKind::RNtoRM:
      return {upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(base_dim)};
  }
  return {};
}

std::vector<double> lift_block(MappingKind kind, std::span<const double> base,
                               std::span<const double> fiber) {
  if (kind == MappingKind::Identity && !fiber.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "identity mapping takes no fiber coordinates");
  }
  if (kind == MappingKind::RemoveRobot && !base.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "removed robot has no base coordinates");
  }
  std::vector<double> out(base.begin(), base.end());
  out.insert(out.end(), fiber.begin(), fiber.end());
  return out;
}

BundleSequence::BundleSequence(std::shared_ptr<const Scene> scene, std::vector<CompositeSpace> levels,
                               std::vector<std::vector<ComponentMapping>> mappings)
    : scene_(std::move(scene)), levels_(std::move(levels)), mappings_(std::move(mappings)) {}

std::size_t BundleSequence::fiber_dimension(int k) const {
  std::size_t n = 0;
  for (const auto& m : mappings(k)) n += m.fiber.dimension();
  return n;
}

Config BundleSequence::project(int k, const Config& upper) const {
  const CompositeSpace& top = level(k + 1);
  const CompositeSpace& base = level(k);
  Config out(static_cast<std::size_t>(base.dimension()));
  const auto& maps = mappings(k);
  for (std::size_t c = 0; c < maps.size(); ++c) {
    const int lower = base.component_of(maps[c].robot);
    if (lower < 0) continue;
    auto dst = base.block(out, static_cast<std::size_t>(lower));
    const auto v = project_block(maps[c].kind, top.block(upper, c), dst.size());
    std::copy(v.begin(), v.end(), dst.begin());
  }
  return out;
}

Config BundleSequence::lift(int k, const Config& base_x, const Config& fiber) const {
  const CompositeSpace& top = level(k + 1);
  const CompositeSpace& base = level(k);
  if (base_x.size() != static_cast<std::size_t>(base.dimension()) ||
      fiber.size() != fiber_dimension(k)) {
    throw Error(ErrorKind::DimensionMismatch, "lift: base or fiber has the wrong dimension");
  }
  Config out(static_cast<std::size_t>(top.dimension()));
  const auto& maps = mappings(k);
  std::size_t f = 0;
  for (std::size_t c = 0; c < maps.size(); ++c) {
    const int lower = base.component_of(maps[c].robot);
    std::span<const double> b;
    if (lower >= 0) b = base.block(base_x, static_cast<std::size_t>(lower));
    const std::size_t fd = maps[c].fiber.dimension();
    const auto v = lift_block(maps[c].kind, b, fiber.values().subspan(f, fd));
    f += fd;
    auto dst = top.block(out, c);
    if (v.size() != dst.size()) {
      throw Error(ErrorKind::DimensionMismatch, "lift: block size does not match component");
    }
    std::copy(v.begin(), v.end(), dst.begin());
  }
  return out;
}

Config BundleSequence::sample_fiber(int k, Rng& rng) const {
  Config out(fiber_dimension(k));
  std::size_t i = 0;
  for (const auto& m : mappings(k)) {
    for (const auto& b : m.fiber.bounds) out[i++] = rng.uniform(b.lo, b.hi);
  }
  return out;
}

Path BundleSequence::project(int k, const Path& upper) const {
  Path out;
  out.level = k;
  out.waypoints.reserve(upper.size());
  for (const auto& w : upper.waypoints) out.waypoints.push_back(project(k, w));
  merge_duplicates(out);
  return out;
}

json BundleSequence::to_json() const {
  json levels = json::array();
  for (const auto& space : levels_) {
    json entries = json::array();
    for (const auto& c : space.components()) {
      entries.push_back({{"robot", scene_->robots[c.robot].name},
                         {"space", to_string(c.kind)},
                         {"shape", shape_to_json(c.shape)}});
    }
    levels.push_back(entries);
  }
  return {{"levels", levels}};
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct Entry {
  int robot = -1;
  SpaceKind kind = SpaceKind::Empty;
  BodyShape shape;
};

SpaceKind parse_space(const std::string& s, const std::string& field) {
  if (s == "R1") return SpaceKind::Segment;
  if (s == "R2") return SpaceKind::Plane;
  if (s == "SE2") return SpaceKind::Rigid;
  if (s == "SE3" || s == "SO3" || s == "SO2") {
    throw Error(ErrorKind::UnsupportedMapping, field + ": space '" + s + "' is not supported", field);
  }
  throw Error(ErrorKind::Schema, field + ": unknown space '" + s + "'", field);
}

Entry parse_entry(const json& j, const Scene& scene, const std::string& field) {
  std::string name;
  if (j.is_string()) {
    name = j.get<std::string>();
  } else if (j.is_object()) {
    name = detail::require_string(j, "robot", field);
  } else {
    throw Error(ErrorKind::Schema, field + ": expected a robot name or entry object", field);
  }
  Entry e;
  e.robot = scene.robot_index(name);
  if (e.robot < 0) throw Error(ErrorKind::RobotUnknown, field + ": unknown robot '" + name + "'", field);
  const RobotSpec& spec = scene.robots[e.robot];
  e.kind = spec.space;
  if (j.is_object() && j.contains("space")) {
    e.kind = parse_space(detail::require_string(j, "space", field), field + ".space");
  }
  const bool allowed = e.kind == spec.space ||
                       (spec.space == SpaceKind::Rigid && e.kind == SpaceKind::Plane);
  if (!allowed) {
    throw Error(ErrorKind::UnsupportedMapping,
                field + ": robot '" + name + "' lives in " + to_string(spec.space) +
                    " and cannot be reduced to " + to_string(e.kind),
                field);
  }
  if (j.is_object() && j.contains("shape")) {
    e.shape = shape_from_json(j.at("shape"), field + ".shape");
  } else if (e.kind == spec.space) {
    e.shape = spec.shape;
  } else {
    e.shape = BodyShape::disk(spec.shape.inscribed_radius());
  }
  return e;
}

FiberSpace fiber_for(MappingKind kind, const ComponentSpace& upper) {
  FiberSpace f;
  switch (kind) {
    case MappingKind::Identity:
      break;
    case MappingKind::RemoveRobot:
      f.bounds = upper.bounds;
      f.angular_last = upper.kind == SpaceKind::Rigid;
      break;
    case MappingKind::SE2toR2:
      f.bounds = {upper.bounds[2]};
      f.angular_last = true;
      break;
    case MappingKind::RNtoRM:
      break;
  }
  return f;
}

}  // namespace

BundleSequence load_bundle(const json& doc, std::shared_ptr<const Scene> scene,
                           double resolution_fraction) {
  const json& levels = detail::require(doc, "levels", "bundle");
  if (!levels.is_array() || levels.empty()) {
    throw Error(ErrorKind::Schema, "bundle.levels: expected a non-empty list", "levels");
  }
  std::vector<std::vector<Entry>> parsed;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const std::string field = "levels[" + std::to_string(k) + "]";
    if (!levels[k].is_array()) throw Error(ErrorKind::Schema, field + ": expected a list", field);
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < levels[k].size(); ++i) {
      Entry e = parse_entry(levels[k][i], *scene, field + "[" + std::to_string(i) + "]");
      for (const auto& other : entries) {
        if (other.robot == e.robot) {
          throw Error(ErrorKind::Validation,
                      field + ": robot '" + scene->robots[e.robot].name + "' listed twice", field);
        }
      }
      entries.push_back(std::move(e));
    }
    if (entries.empty()) throw Error(ErrorKind::Validation, field + ": level has no robots", field);
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.robot < b.robot; });
    parsed.push_back(std::move(entries));
  }

  const auto& top = parsed.back();
  const std::string top_field = "levels[" + std::to_string(parsed.size() - 1) + "]";
  if (top.size() != scene->robots.size()) {
    throw Error(ErrorKind::Validation, top_field + ": top level must contain every scene robot",
                top_field);
  }
  for (const auto& e : top) {
    const auto& spec = scene->robots[e.robot];
    if (e.kind != spec.space || !(e.shape == spec.shape)) {
      throw Error(ErrorKind::Validation,
                  top_field + ": robot '" + spec.name + "' must use its scene space and shape",
                  top_field);
    }
  }

  std::vector<std::vector<ComponentSpace>> components;
  for (const auto& entries : parsed) {
    std::vector<ComponentSpace> comps;
    for (const auto& e : entries) {
      comps.push_back(ComponentSpace::for_robot(*scene, e.robot, e.kind, e.shape));
    }
    components.push_back(std::move(comps));
  }
  // every level checks segments at the top level's resolution
  const double top_measure = CompositeSpace(scene, components.back()).measure();
  std::vector<CompositeSpace> spaces;
  for (auto& comps : components) {
    spaces.emplace_back(scene, std::move(comps), resolution_fraction, top_measure);
  }

  std::vector<std::vector<ComponentMapping>> mappings;
  for (std::size_t k = 0; k + 1 < parsed.size(); ++k) {
    const std::string field = "levels[" + std::to_string(k) + "]";
    const auto& lower = parsed[k];
    const auto& upper = parsed[k + 1];
    for (const auto& e : lower) {
      const bool present = std::any_of(upper.begin(), upper.end(),
                                       [&](const Entry& u) { return u.robot == e.robot; });
      if (!present) {
        throw Error(ErrorKind::Validation,
                    field + ": robot '" + scene->robots[e.robot].name +
                        "' disappears on the level above",
                    field);
      }
    }
    std::vector<ComponentMapping> maps;
    bool reduces = false;
    for (std::size_t c = 0; c < upper.size(); ++c) {
      const Entry& u = upper[c];
      ComponentMapping m;
      m.robot = u.robot;
      const auto it = std::find_if(lower.begin(), lower.end(),
                                   [&](const Entry& l) { return l.robot == u.robot; });
      if (it == lower.end()) {
        m.kind = MappingKind::RemoveRobot;
      } else if (it->kind == u.kind) {
        m.kind = MappingKind::Identity;
      } else if (u.kind == SpaceKind::Rigid && it->kind == SpaceKind::Plane) {
        m.kind = MappingKind::SE2toR2;
      } else {
        throw Error(ErrorKind::UnsupportedMapping,
                    field + ": robot '" + scene->robots[u.robot].name + "' maps " +
                        to_string(u.kind) + " onto " + to_string(it->kind),
                    field);
      }
      if (m.kind != MappingKind::Identity || !(it->shape == u.shape)) reduces = true;
      m.fiber = fiber_for(m.kind, spaces[k + 1].components()[c]);
      maps.push_back(std::move(m));
    }
    if (!reduces) {
      throw Error(ErrorKind::Validation,
                  field + ": identical to the level above (identity-only projection)", field);
    }
    mappings.push_back(std::move(maps));
  }
  return BundleSequence(std::move(scene), std::move(spaces), std::move(mappings));
}

BundleSequence parse_bundle(std::string_view text, std::shared_ptr<const Scene> scene,
                           double resolution_fraction) {
  return load_bundle(detail::parse(text, "bundle"), std::move(scene), resolution_fraction);
}

BundleSequence single_level_bundle(std::shared_ptr<const Scene> scene, double resolution_fraction) {
  json level = json::array();
  for (const auto& r : scene->robots) level.push_back(r.name);
  return load_bundle(json{{"levels", json::array({level})}}, std::move(scene), resolution_fraction);
}

AdmissibilityReport check_admissibility(const BundleSequence& seq, int k, int n_samples, Rng& rng) {
  AdmissibilityReport report;
  const CompositeSpace& top = seq.level(k + 1);
  const CompositeSpace& base = seq.level(k);
  const long max_attempts = 1000L * n_samples;
  for (long attempt = 0; attempt < max_attempts && report.samples < n_samples; ++attempt) {
    const Config x = top.sample_uniform(rng);
    if (!top.is_config_feasible(x)) continue;
    ++report.samples;
    const Config y = seq.project(k, x);
    if (!base.contains(y) || !base.is_config_feasible(y)) {
      ++report.violations;
      if (report.counterexamples.size() < 5) report.counterexamples.push_back(x);
    }
  }
  return report;
}

}  // namespace explorer

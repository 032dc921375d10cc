#pragma once

#include <memory>
#include <string>

#include "explorer/bundle.hpp"
#include "explorer/io.hpp"
#include "explorer/scene.hpp"

namespace test_support {

inline std::shared_ptr<const explorer::Scene> scene(const std::string& name) {
  return std::make_shared<const explorer::Scene>(
      explorer::parse_scene(explorer::read_file(explorer::fixture_path("scenes/" + name + ".json"))));
}

inline explorer::BundleSequence bundle(const std::string& scene_name, const std::string& bundle_name) {
  return explorer::parse_bundle(
      explorer::read_file(explorer::fixture_path("bundles/" + bundle_name + ".json")),
      scene(scene_name));
}

inline std::shared_ptr<const explorer::Scene> scene_from(const std::string& text) {
  return std::make_shared<const explorer::Scene>(explorer::parse_scene(text));
}

/// One small disk moving from (0,0) to (1,1) in an empty square slightly
/// larger than the unit square.
inline std::shared_ptr<const explorer::Scene> unit_square() {
  return scene_from(R"({
    "name": "unit_square",
    "workspace": {"bounds": [[-0.1, -0.1], [1.1, 1.1]], "obstacles": []},
    "robots": [{"name": "a", "shape": {"type": "disk", "radius": 0.05}, "space": "R2",
                "start": [0.0, 0.0], "goal": [1.0, 1.0]}]
  })");
}

inline explorer::CompositeSpace top_space(std::shared_ptr<const explorer::Scene> s) {
  return explorer::single_level_bundle(std::move(s)).level(1);
}

}  // namespace test_support

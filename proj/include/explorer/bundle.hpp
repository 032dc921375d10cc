#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "explorer/cspace.hpp"
#include "explorer/path.hpp"
#include "json.hpp"

namespace explorer {

enum class MappingKind { Identity, RemoveRobot, SE2toR2, RNtoRM };

const char* to_string(MappingKind kind);

/// Coordinates dropped by one component projection. The last coordinate is
/// an angle when `angular_last` is set.
struct FiberSpace {
  std::vector<Interval> bounds;
  bool angular_last = false;

  std::size_t dimension() const { return bounds.size(); }
};

/// How one robot's component space on level k+1 projects onto level k.
struct ComponentMapping {
  MappingKind kind = MappingKind::Identity;
  int robot = -1;
  FiberSpace fiber;
};

/// Block-level projection: keeps the leading `base_dim` coordinates.
std::vector<double> project_block(MappingKind kind, std::span<const double> upper,
                                  std::size_t base_dim);
/// Block-level lift: base coordinates followed by fiber coordinates.
std::vector<double> lift_block(MappingKind kind, std::span<const double> base,
                               std::span<const double> fiber);

/// X_K -> X_{K-1} -> ... -> X_1, built componentwise per robot. Levels are
/// numbered 1..K; level K is the full scene space. Immutable after loading.
class BundleSequence {
 public:
  BundleSequence(std::shared_ptr<const Scene> scene, std::vector<CompositeSpace> levels,
                 std::vector<std::vector<ComponentMapping>> mappings);

  const Scene& scene() const { return *scene_; }
  const std::shared_ptr<const Scene>& scene_ptr() const { return scene_; }
  int size() const { return static_cast<int>(levels_.size()); }
  const CompositeSpace& level(int k) const { return levels_.at(static_cast<std::size_t>(k - 1)); }
  /// Mappings from level k+1 down to level k, one per component of level k+1.
  const std::vector<ComponentMapping>& mappings(int k) const {
    return mappings_.at(static_cast<std::size_t>(k - 1));
  }
  std::size_t fiber_dimension(int k) const;

  Config project(int k, const Config& upper) const;
  /// `fiber` holds the fiber blocks of level k+1's components back to back.
  Config lift(int k, const Config& base, const Config& fiber) const;
  Config sample_fiber(int k, Rng& rng) const;
  Path project(int k, const Path& upper) const;

  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const Scene> scene_;
  std::vector<CompositeSpace> levels_;
  std::vector<std::vector<ComponentMapping>> mappings_;
};

BundleSequence load_bundle(const nlohmann::json& doc, std::shared_ptr<const Scene> scene,
                           double resolution_fraction = 0.01);
BundleSequence parse_bundle(std::string_view text, std::shared_ptr<const Scene> scene,
                           double resolution_fraction = 0.01);
/// One level holding every robot of the scene.
BundleSequence single_level_bundle(std::shared_ptr<const Scene> scene,
                                   double resolution_fraction = 0.01);

struct AdmissibilityReport {
  int samples = 0;
  int violations = 0;
  std::vector<Config> counterexamples;  // first few, on level k+1

  bool passed() const { return violations == 0; }
};

/// Samples feasible configurations on level k+1 and checks that their
/// projections are feasible on level k.
AdmissibilityReport check_admissibility(const BundleSequence& seq, int k, int n_samples, Rng& rng);

}  // namespace explorer

#pragma once

#include <cstdint>
#include <vector>

#include "explorer/cspace.hpp"
#include "explorer/path.hpp"
#include "explorer/rng.hpp"

namespace explorer {

/// Cost functional J. Only path length is implemented: the integral of the
/// speed norm, which on a piecewise-linear path is the sum of segment lengths.
enum class CostKind { PathLength };

double cost(const CompositeSpace& space, const Path& path, CostKind kind = CostKind::PathLength);

/// Throws InfeasibleInput unless the path starts at the level's start, ends at
/// its goal, and every segment is feasible.
void validate_path(const CompositeSpace& space, const Path& path);

/// Local optimizer Phi_J. Implementations must be deterministic given the
/// random stream and safe to call concurrently on different paths.
class PathOptimizer {
 public:
  virtual ~PathOptimizer() = default;
  virtual Path optimize(const CompositeSpace& space, const Path& path, Rng& rng) const = 0;
  /// Relative cost change below which a round counts as converged (tol_J).
  virtual double tolerance() const = 0;
};

struct ShortcutSettings {
  int shortcut_attempts = 50;
  double tolerance = 1e-4;
  int max_rounds = 60;
  /// Consecutive converged rounds needed to stop.
  int patience = 3;
};

/// Random shortcutting, vertex pull toward neighbor midpoints, and
/// densification to the space resolution, repeated until converged.
class ShortcutOptimizer final : public PathOptimizer {
 public:
  explicit ShortcutOptimizer(ShortcutSettings settings = {}) : settings_(settings) {}

  Path optimize(const CompositeSpace& space, const Path& path, Rng& rng) const override;
  double tolerance() const override { return settings_.tolerance; }
  const ShortcutSettings& settings() const { return settings_; }

 private:
  ShortcutSettings settings_;
};

/// Visibility deformation: both paths resampled at `rungs + 1` points by
/// normalized arc length; true iff every straight rung between matching
/// points is feasible. Rung endpoints lie on the paths and are not
/// rechecked. Throws EndpointMismatch for different endpoints.
bool is_deformable(const CompositeSpace& space, const Path& a, const Path& b, int rungs = 100);

/// Hash of a path's level and waypoint bits.
std::uint64_t path_seed(const Path& path);

/// The optimizer as a function of its input: seeded by path_seed.
Path optimize_seeded_by_path(const PathOptimizer& optimizer, const CompositeSpace& space,
                             const Path& path);

/// Morse equivalence, tested as deformability of the two optimized paths.
bool paths_equivalent(const CompositeSpace& space, const PathOptimizer& optimizer, const Path& a,
                      const Path& b, Rng& rng, int rungs = 100);

struct OracleSettings {
  int starts = 200;
  int via_points = 3;
  int rungs = 100;
  /// Attempts to make one random seed path feasible.
  int retry_cap = 200;
};

struct OracleMinimum {
  Path path;
  double cost = 0.0;
  int cluster_size = 0;
};

struct OracleResult {
  std::vector<OracleMinimum> minima;  // ascending cost
  int feasible_starts = 0;
};

/// Independent minima enumeration that uses neither roadmaps nor bundles:
/// random via-point paths, optimized and clustered by deformability.
OracleResult multistart_oracle(const CompositeSpace& space, const PathOptimizer& optimizer,
                               const OracleSettings& settings, Rng& rng);

}  // namespace explorer

#pragma once

#include <vector>

#include "explorer/cspace.hpp"
#include "json.hpp"

namespace explorer {

/// Piecewise-linear path on one bundle level.
struct Path {
  int level = 0;
  std::vector<Config> waypoints;

  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
  const Config& front() const { return waypoints.front(); }
  const Config& back() const { return waypoints.back(); }
};

/// Running arc length at each waypoint; first entry 0.
std::vector<double> cumulative_lengths(const CompositeSpace& space, const Path& path);

/// Point at arc length `s` (clamped to [0, length]).
Config point_at(const CompositeSpace& space, const Path& path, std::span<const double> cumulative,
                double s);

/// Path resampled at `n + 1` points evenly spaced by normalized arc length.
std::vector<Config> resample(const CompositeSpace& space, const Path& path, std::size_t n);

/// The path with every point is_segment_feasible checks inserted as a
/// waypoint.
Path with_check_points(const CompositeSpace& space, const Path& path);

/// Drops consecutive duplicate waypoints.
void merge_duplicates(Path& path);

nlohmann::json path_to_json(const Path& path);
Path path_from_json(const CompositeSpace& space, const nlohmann::json& j);

}  // namespace explorer

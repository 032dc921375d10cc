#include "explorer/path.hpp"

#include <algorithm>
#include <cmath>

#include "explorer/error.hpp"
#include "json_util.hpp"

namespace explorer {

using nlohmann::json;

std::vector<double> cumulative_lengths(const CompositeSpace& space, const Path& path) {
  std::vector<double> out;
  out.reserve(path.size());
  double s = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) s += space.distance(path.waypoints[i - 1], path.waypoints[i]);
    out.push_back(s);
  }
  return out;
}

Config point_at(const CompositeSpace& space, const Path& path, std::span<const double> cumulative,
                double s) {
  if (path.size() == 1 || s <= 0.0) return path.front();
  if (s >= cumulative.back()) return path.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
  const auto i = static_cast<std::size_t>(it - cumulative.begin());  // 1 <= i < size
  const double seg = cumulative[i] - cumulative[i - 1];
  const double t = seg > 0.0 ? (s - cumulative[i - 1]) / seg : 0.0;
  return space.interpolate(path.waypoints[i - 1], path.waypoints[i], t);
}

std::vector<Config> resample(const CompositeSpace& space, const Path& path, std::size_t n) {
  const auto cum = cumulative_lengths(space, path);
  const double total = cum.back();
  std::vector<Config> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    if (i == n) {
      out.push_back(path.back());
    } else {
      out.push_back(point_at(space, path, cum, total * static_cast<double>(i) / static_cast<double>(n)));
    }
  }
  return out;
}

void merge_duplicates(Path& path) {
  path.waypoints.erase(std::unique(path.waypoints.begin(), path.waypoints.end()),
                       path.waypoints.end());
}

Path with_check_points(const CompositeSpace& space, const Path& path) {
  Path out{path.level, {}};
  if (path.empty()) return out;
  out.waypoints.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Config& a = path.waypoints[i - 1];
    const Config& b = path.waypoints[i];
    const bool swap = b < a;
    const Config& from = swap ? b : a;
    const Config& to = swap ? a : b;
    const auto steps =
        static_cast<std::size_t>(std::ceil(space.distance(from, to) / space.resolution()));
    for (std::size_t s = 1; s < steps; ++s) {
      const std::size_t j = swap ? steps - s : s;
      out.waypoints.push_back(
          space.interpolate(from, to, static_cast<double>(j) / static_cast<double>(steps)));
    }
    out.waypoints.push_back(b);
  }
  return out;
}

json path_to_json(const Path& path) {
  json wps = json::array();
  for (const auto& w : path.waypoints) wps.push_back(config_to_json(w));
  return {{"level", path.level}, {"waypoints", wps}};
}

Path path_from_json(const CompositeSpace& space, const json& j) {
  Path p;
  p.level = static_cast<int>(detail::require_number(j, "level", "path"));
  const json& wps = detail::require(j, "waypoints", "path");
  if (!wps.is_array() || wps.empty()) {
    throw Error(ErrorKind::Schema, "path.waypoints: expected a non-empty list", "path.waypoints");
  }
  for (const auto& w : wps) p.waypoints.push_back(config_from_json(space, w));
  return p;
}

}  // namespace explorer

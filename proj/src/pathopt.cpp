#include "explorer/pathopt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "explorer/error.hpp"
#include "explorer/kernels.hpp"

namespace explorer {

namespace {

constexpr double kStrictGain = 1e-12;

/// Segment test for optimizer moves. New segments must keep the clearance
/// margin, except next to a path endpoint that has none itself.
struct MoveCheck {
  const CompositeSpace& space;
  Config first;
  Config last;
  bool tight_first;
  bool tight_last;

  MoveCheck(const CompositeSpace& s, const Path& p)
      : space(s),
        first(p.front()),
        last(p.back()),
        tight_first(!s.is_config_clear(p.front())),
        tight_last(!s.is_config_clear(p.back())) {}

  bool operator()(const Config& a, const Config& b) const {
    if (space.is_segment_clear(a, b)) return true;
    const bool tight = (tight_first && (a == first || b == first)) ||
                       (tight_last && (a == last || b == last));
    return tight && space.is_segment_feasible(a, b);
  }
};

std::size_t segment_index(std::span<const double> cum, double s) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum.begin(), 1)) - 1;
  return std::min(i, cum.size() - 2);
}

void shortcut(const CompositeSpace& space, const MoveCheck& ok, Path& p, Rng& rng, int attempts) {
  for (int a = 0; a < attempts && p.size() > 2; ++a) {
    const auto cum = cumulative_lengths(space, p);
    const double total = cum.back();
    double s1 = rng.uniform(0.0, total);
    double s2 = rng.uniform(0.0, total);
    if (s1 > s2) std::swap(s1, s2);
    const std::size_t i = segment_index(cum, s1);
    const std::size_t j = segment_index(cum, s2);
    if (i == j) continue;
    const Config x = point_at(space, p, cum, s1);
    const Config y = point_at(space, p, cum, s2);
    const double d = space.distance(x, y);
    if (d >= (s2 - s1) - kStrictGain * total) continue;
    if (!ok(x, y) || !ok(p.waypoints[i], x) || !ok(y, p.waypoints[j + 1])) continue;
    std::vector<Config> next;
    next.reserve(p.size());
    next.insert(next.end(), p.waypoints.begin(), p.waypoints.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    next.push_back(x);
    next.push_back(y);
    next.insert(next.end(), p.waypoints.begin() + static_cast<std::ptrdiff_t>(j) + 1, p.waypoints.end());
    p.waypoints = std::move(next);
    merge_duplicates(p);
  }
}

void reduce_vertices(const CompositeSpace& space, const MoveCheck& ok, Path& p) {
  std::size_t i = 1;
  while (i + 1 < p.size()) {
    const Config& a = p.waypoints[i - 1];
    const Config& b = p.waypoints[i];
    const Config& c = p.waypoints[i + 1];
    const double via = space.distance(a, b) + space.distance(b, c);
    if (space.distance(a, c) < via - kStrictGain * (via + 1.0) && ok(a, c)) {
      p.waypoints.erase(p.waypoints.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

void densify(const CompositeSpace& space, Path& p) { p = with_check_points(space, p); }

void pull(const CompositeSpace& space, const MoveCheck& ok, Path& p) {
  static constexpr double kSteps[] = {1.0, 0.5, 0.25};
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const Config& prev = p.waypoints[i - 1];
    const Config& next = p.waypoints[i + 1];
    const Config mid = space.interpolate(prev, next, 0.5);
    const double before = space.distance(prev, p.waypoints[i]) + space.distance(p.waypoints[i], next);
    for (double alpha : kSteps) {
      Config cand = space.interpolate(p.waypoints[i], mid, alpha);
      const double after = space.distance(prev, cand) + space.distance(cand, next);
      if (after >= before) break;
      if (ok(prev, cand) && ok(cand, next)) {
        p.waypoints[i] = std::move(cand);
        break;
      }
    }
  }
}

}  // namespace

double cost(const CompositeSpace& space, const Path& path, CostKind /*kind*/) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += space.distance(path.waypoints[i - 1], path.waypoints[i]);
  }
  return total;
}

void validate_path(const CompositeSpace& space, const Path& path) {
  if (path.size() < 2) {
    throw Error(ErrorKind::InfeasibleInput, "path needs at least two waypoints");
  }
  for (const auto& w : path.waypoints) {
    if (w.size() != static_cast<std::size_t>(space.dimension())) {
      throw Error(ErrorKind::InfeasibleInput, "waypoint dimension does not match the level");
    }
  }
  if (path.front() != space.start() || path.back() != space.goal()) {
    throw Error(ErrorKind::InfeasibleInput, "path does not connect the level start and goal");
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!space.is_segment_feasible(path.waypoints[i - 1], path.waypoints[i])) {
      throw Error(ErrorKind::InfeasibleInput,
                  "segment " + std::to_string(i - 1) + " of the path is infeasible");
    }
  }
}

Path ShortcutOptimizer::optimize(const CompositeSpace& space, const Path& input, Rng& rng) const {
  validate_path(space, input);
  Path p = input;
  merge_duplicates(p);
  if (p.size() < 2) p.waypoints.push_back(p.front());
  const double initial = cost(space, input);
  double current = cost(space, p);
  const MoveCheck ok(space, p);
  int calm = 0;
  for (int round = 0; round < settings_.max_rounds && p.size() > 2; ++round) {
    shortcut(space, ok, p, rng, settings_.shortcut_attempts);
    reduce_vertices(space, ok, p);
    densify(space, p);
    pull(space, ok, p);
    const double next = cost(space, p);
    const double gain = (current - next) / std::max(current, 1e-300);
    current = next;
    if (gain < settings_.tolerance) {
      if (++calm >= settings_.patience) break;
    } else {
      calm = 0;
    }
  }
  reduce_vertices(space, ok, p);
  if (cost(space, p) > initial) return input;
  return p;
}

bool is_deformable(const CompositeSpace& space, const Path& a, const Path& b, int rungs) {
  if (a.empty() || b.empty() || a.front() != b.front() || a.back() != b.back()) {
    throw Error(ErrorKind::EndpointMismatch, "paths do not share start and goal");
  }
  const auto n = static_cast<std::size_t>(std::max(rungs, 1));
  const auto ra = resample(space, a, n);
  const auto rb = resample(space, b, n);
  return kernels::all_rungs_feasible(space, ra, rb);
}

std::uint64_t path_seed(const Path& path) {
  std::uint64_t h = Rng::mix(static_cast<std::uint64_t>(path.level));
  for (const auto& w : path.waypoints) {
    for (const double v : w.values()) h = Rng::mix(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

Path optimize_seeded_by_path(const PathOptimizer& optimizer, const CompositeSpace& space,
                             const Path& path) {
  Rng rng(path_seed(path));
  return optimizer.optimize(space, path, rng);
}

bool paths_equivalent(const CompositeSpace& space, const PathOptimizer& optimizer, const Path& a,
                      const Path& b, Rng& rng, int rungs) {
  if (a.empty() || b.empty() || a.front() != b.front() || a.back() != b.back()) {
    throw Error(ErrorKind::EndpointMismatch, "paths do not share start and goal");
  }
  Rng ra = rng.split();
  Rng rb = rng.split();
  return is_deformable(space, optimizer.optimize(space, a, ra), optimizer.optimize(space, b, rb),
                       rungs);
}

namespace {

/// Splits infeasible segments at perturbed midpoints until every segment is
/// feasible or the retry budget runs out.
bool repair(const CompositeSpace& space, std::vector<Config>& pts, Rng& rng, int budget) {
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    if (space.is_segment_feasible(pts[i], pts[i + 1])) {
      ++i;
      continue;
    }
    if (budget-- <= 0 || pts.size() > 512) return false;
    const double d = space.distance(pts[i], pts[i + 1]);
    const Config mid = space.interpolate(pts[i], pts[i + 1], 0.5);
    Config cand = space.perturb(mid, 0.5 * d, rng);
    int tries = 0;
    while (!space.is_config_feasible(cand) && tries++ < 50) {
      cand = space.perturb(mid, 0.5 * d, rng);
    }
    if (!space.is_config_feasible(cand)) return false;
    pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(cand));
  }
  return true;
}

}  // namespace

OracleResult multistart_oracle(const CompositeSpace& space, const PathOptimizer& optimizer,
                               const OracleSettings& settings, Rng& rng) {
  if (settings.starts < 1) {
    throw Error(ErrorKind::Validation, "oracle needs at least one start", "starts");
  }
  const Config start = space.start();
  const Config goal = space.goal();
  std::vector<Path> seeds_paths;
  for (int s = 0; s < settings.starts; ++s) {
    Rng local = rng.split();
    std::vector<Config> pts{start};
    for (int v = 0; v < settings.via_points; ++v) {
      Config q = space.sample_uniform(local);
      int tries = 0;
      while (!space.is_config_feasible(q) && tries++ < 1000) q = space.sample_uniform(local);
      pts.push_back(std::move(q));
    }
    pts.push_back(goal);
    bool ok = std::all_of(pts.begin(), pts.end(),
                          [&](const Config& q) { return space.is_config_feasible(q); });
    ok = ok && repair(space, pts, local, settings.retry_cap);
    if (ok) seeds_paths.push_back(Path{0, std::move(pts)});
  }
  OracleResult result;
  result.feasible_starts = static_cast<int>(seeds_paths.size());
  if (2 * result.feasible_starts < settings.starts) {
    throw Error(ErrorKind::OracleIncomplete,
                "only " + std::to_string(result.feasible_starts) + " of " +
                    std::to_string(settings.starts) + " oracle seeds could be made feasible");
  }
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < seeds_paths.size(); ++i) seeds.push_back(rng.next_seed());
  auto optimized = kernels::optimize_all(optimizer, space, seeds_paths, seeds);

  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < optimized.size(); ++i) order.emplace_back(cost(space, optimized[i]), i);
  std::sort(order.begin(), order.end());
  for (const auto& [c, i] : order) {
    bool merged = false;
    for (auto& m : result.minima) {
      if (is_deformable(space, m.path, optimized[i], settings.rungs)) {
        ++m.cluster_size;
        merged = true;
        break;
      }
    }
    if (!merged) result.minima.push_back({optimized[i], c, 1});
  }
  return result;
}

}  // namespace explorer

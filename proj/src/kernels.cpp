#include "explorer/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace explorer::kernels {

namespace {

using Ranked = std::pair<double, std::size_t>;

bool is_alive(std::span<const char> alive, std::size_t i) { return alive.empty() || alive[i] != 0; }

std::vector<std::size_t> take_k(std::vector<Ranked>& ranked, std::size_t k) {
  k = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].second);
  return out;
}

std::vector<std::size_t> sorted_ids(std::vector<Ranked>& ranked) {
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::size_t> out;
  out.reserve(ranked.size());
  for (const auto& r : ranked) out.push_back(r.second);
  return out;
}

constexpr double kDead = std::numeric_limits<double>::infinity();

// Below these sizes thread start-up costs more than the work.
constexpr std::size_t kParallelPoints = 2048;
constexpr std::size_t kParallelSegments = 16;
constexpr std::size_t kParallelPaths = 2;

}  // namespace

namespace serial {

std::vector<std::size_t> nearest(const CompositeSpace& space, std::span<const Config> points,
                                 const Config& q, std::size_t k, std::span<const char> alive) {
  std::vector<Ranked> ranked;
  ranked.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (is_alive(alive, i)) ranked.emplace_back(space.distance(points[i], q), i);
  }
  return take_k(ranked, k);
}

std::vector<std::size_t> within_radius(const CompositeSpace& space, std::span<const Config> points,
                                       const Config& q, double radius,
                                       std::span<const char> alive) {
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!is_alive(alive, i)) continue;
    const double d = space.distance(points[i], q);
    if (d <= radius) ranked.emplace_back(d, i);
  }
  return sorted_ids(ranked);
}

bool all_rungs_feasible(const CompositeSpace& space, std::span<const Config> from,
                        std::span<const Config> to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!space.is_interior_feasible(from[i], to[i])) return false;
  }
  return true;
}

std::vector<Path> optimize_all(const PathOptimizer& optimizer, const CompositeSpace& space,
                               std::span<const Path> paths, std::span<const std::uint64_t> seeds) {
  std::vector<Path> out;
  out.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Rng rng(seeds[i]);
    out.push_back(optimizer.optimize(space, paths[i], rng));
  }
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<std::size_t> nearest(const CompositeSpace& space, std::span<const Config> points,
                                 const Config& q, std::size_t k, std::span<const char> alive) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<Ranked> all(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    all[u] = {is_alive(alive, u) ? space.distance(points[u], q) : kDead, u};
  }
  std::erase_if(all, [](const Ranked& r) { return r.first == kDead; });
  return take_k(all, k);
}

std::vector<std::size_t> within_radius(const CompositeSpace& space, std::span<const Config> points,
                                       const Config& q, double radius,
                                       std::span<const char> alive) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<Ranked> all(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    all[u] = {is_alive(alive, u) ? space.distance(points[u], q) : kDead, u};
  }
  std::erase_if(all, [radius](const Ranked& r) { return !(r.first <= radius); });
  return sorted_ids(all);
}

bool all_rungs_feasible(const CompositeSpace& space, std::span<const Config> from,
                        std::span<const Config> to) {
  const auto n = static_cast<std::ptrdiff_t>(from.size());
  std::atomic<bool> ok{true};
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!ok.load(std::memory_order_relaxed)) continue;
    const auto u = static_cast<std::size_t>(i);
    if (!space.is_interior_feasible(from[u], to[u])) ok.store(false, std::memory_order_relaxed);
  }
  return ok.load();
}

std::vector<Path> optimize_all(const PathOptimizer& optimizer, const CompositeSpace& space,
                               std::span<const Path> paths, std::span<const std::uint64_t> seeds) {
  const auto n = static_cast<std::ptrdiff_t>(paths.size());
  std::vector<Path> out(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      Rng rng(seeds[u]);
      out[u] = optimizer.optimize(space, paths[u], rng);
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace parallel

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<std::size_t> nearest(const CompositeSpace& space, std::span<const Config> points,
                                 const Config& q, std::size_t k, std::span<const char> alive) {
  if (thread_count() > 1 && points.size() >= kParallelPoints) {
    return parallel::nearest(space, points, q, k, alive);
  }
  return serial::nearest(space, points, q, k, alive);
}

std::vector<std::size_t> within_radius(const CompositeSpace& space, std::span<const Config> points,
                                       const Config& q, double radius,
                                       std::span<const char> alive) {
  if (thread_count() > 1 && points.size() >= kParallelPoints) {
    return parallel::within_radius(space, points, q, radius, alive);
  }
  return serial::within_radius(space, points, q, radius, alive);
}

bool all_rungs_feasible(const CompositeSpace& space, std::span<const Config> from,
                        std::span<const Config> to) {
  if (thread_count() > 1 && from.size() >= kParallelSegments) {
    return parallel::all_rungs_feasible(space, from, to);
  }
  return serial::all_rungs_feasible(space, from, to);
}

std::vector<Path> optimize_all(const PathOptimizer& optimizer, const CompositeSpace& space,
                               std::span<const Path> paths, std::span<const std::uint64_t> seeds) {
  if (thread_count() > 1 && paths.size() >= kParallelPaths) {
    return parallel::optimize_all(optimizer, space, paths, seeds);
  }
  return serial::optimize_all(optimizer, space, paths, seeds);
}

}  // namespace explorer::kernels

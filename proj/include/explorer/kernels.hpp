#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "explorer/cspace.hpp"
#include "explorer/pathopt.hpp"

// Data-parallel inner loops of the planner. Every kernel has a serial
// reference version and an OpenMP version that must return identical
// results; the unqualified entry points pick one by problem size.

namespace explorer::kernels {

/// Indices of the k points closest to q, ordered by (distance, index).
/// Entries with alive[i] == 0 are skipped when `alive` is non-empty.
using NearestFn = std::vector<std::size_t> (*)(const CompositeSpace&, std::span<const Config>,
                                               const Config&, std::size_t,
                                               std::span<const char>);

/// Indices of points within `radius` of q, ordered by (distance, index).
using RadiusFn = std::vector<std::size_t> (*)(const CompositeSpace&, std::span<const Config>,
                                              const Config&, double, std::span<const char>);

namespace serial {
std::vector<std::size_t> nearest(const CompositeSpace& space, std::span<const Config> points,
                                 const Config& q, std::size_t k, std::span<const char> alive = {});
std::vector<std::size_t> within_radius(const CompositeSpace& space, std::span<const Config> points,
                                       const Config& q, double radius,
                                       std::span<const char> alive = {});
/// True iff the interior of every segment from[i] -> to[i] is feasible.
/// Endpoints are taken as given.
bool all_rungs_feasible(const CompositeSpace& space, std::span<const Config> from,
                        std::span<const Config> to);
std::vector<Path> optimize_all(const PathOptimizer& optimizer, const CompositeSpace& space,
                               std::span<const Path> paths, std::span<const std::uint64_t> seeds);
}  // namespace serial

namespace parallel {
std::vector<std::size_t> nearest(const CompositeSpace& space, std::span<const Config> points,
                                 const Config& q, std::size_t k, std::span<const char> alive = {});
std::vector<std::size_t> within_radius(const CompositeSpace& space, std::span<const Config> points,
                                       const Config& q, double radius,
                                       std::span<const char> alive = {});
bool all_rungs_feasible(const CompositeSpace& space, std::span<const Config> from,
                        std::span<const Config> to);
std::vector<Path> optimize_all(const PathOptimizer& optimizer, const CompositeSpace& space,
                               std::span<const Path> paths, std::span<const std::uint64_t> seeds);
}  // namespace parallel

std::vector<std::size_t> nearest(const CompositeSpace& space, std::span<const Config> points,
                                 const Config& q, std::size_t k, std::span<const char> alive = {});
std::vector<std::size_t> within_radius(const CompositeSpace& space, std::span<const Config> points,
                                       const Config& q, double radius,
                                       std::span<const char> alive = {});
bool all_rungs_feasible(const CompositeSpace& space, std::span<const Config> from,
                        std::span<const Config> to);
std::vector<Path> optimize_all(const PathOptimizer& optimizer, const CompositeSpace& space,
                               std::span<const Path> paths, std::span<const std::uint64_t> seeds);

/// Number of OpenMP threads available, 1 without OpenMP.
int thread_count();

}  // namespace explorer::kernels

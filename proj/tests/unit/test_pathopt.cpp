#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "explorer/error.hpp"
#include "explorer/pathopt.hpp"
#include "support.hpp"

using namespace explorer;

namespace {

Path zigzag(const CompositeSpace& space, Rng& rng, int bends) {
  Path p{1, {space.start()}};
  for (int i = 1; i <= bends; ++i) {
    const double t = static_cast<double>(i) / (bends + 1);
    const double x = t + rng.uniform(-0.1, 0.1);
    const double y = t + (i % 2 == 0 ? 0.25 : -0.25) + rng.uniform(-0.05, 0.05);
    p.waypoints.push_back(Config({std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)}));
  }
  p.waypoints.push_back(space.goal());
  return p;
}

Path crossing_path(bool r1_first) {
  if (r1_first) return Path{2, {Config({0.0, 0.0}), Config({1.0, 0.0}), Config({1.0, 1.0})}};
  return Path{2, {Config({0.0, 0.0}), Config({0.0, 1.0}), Config({1.0, 1.0})}};
}

}  // namespace

TEST_CASE("cost is the sum of segment lengths") {
  const auto space = test_support::top_space(test_support::unit_square());
  const Path p{1, {Config({0.0, 0.0}), Config({1.0, 0.0}), Config({1.0, 1.0})}};
  CHECK(cost(space, p) == doctest::Approx(2.0));
  const Path s{1, {Config({0.0, 0.0}), Config({1.0, 1.0})}};
  CHECK(cost(space, s) == doctest::Approx(std::sqrt(2.0)));
  const Path refined{1, {Config({0.0, 0.0}), Config({0.5, 0.5}), Config({1.0, 1.0})}};
  CHECK(std::abs(cost(space, refined) - cost(space, s)) < 1e-12);
}

TEST_CASE("optimize rejects invalid input") {
  const auto space = test_support::top_space(test_support::scene("crossing_disks"));
  ShortcutOptimizer opt;
  Rng rng(1);
  const Path through{2, {space.start(), space.goal()}};
  CHECK_THROWS_AS(opt.optimize(space, through, rng), Error);
  const Path short_one{2, {space.start()}};
  CHECK_THROWS_AS(opt.optimize(space, short_one, rng), Error);
  const Path wrong_end{2, {space.start(), Config({0.0, 1.0})}};
  CHECK_THROWS_AS(opt.optimize(space, wrong_end, rng), Error);
}

TEST_CASE("straight path is a fixed point") {
  const auto space = test_support::top_space(test_support::unit_square());
  ShortcutOptimizer opt;
  Rng rng(2);
  const Path s{1, {space.start(), space.goal()}};
  const Path out = opt.optimize(space, s, rng);
  CHECK(std::abs(cost(space, out) - cost(space, s)) < 1e-12);
}

TEST_CASE("zig-zags converge to the straight line, monotonically and idempotently") {
  const auto space = test_support::top_space(test_support::unit_square());
  ShortcutOptimizer opt;
  Rng draws(42);
  for (int seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    const Path p = zigzag(space, draws, 3 + seed % 5);
    validate_path(space, p);
    Rng rng(static_cast<std::uint64_t>(seed));
    const Path once = opt.optimize(space, p, rng);
    const Path twice = opt.optimize(space, once, rng);
    const double c0 = cost(space, p);
    const double c1 = cost(space, once);
    const double c2 = cost(space, twice);
    CHECK(c1 <= c0);
    CHECK(std::abs(c2 - c1) <= opt.tolerance() * c1);
    CHECK(std::abs(c1 - std::sqrt(2.0)) < 1e-3);
    validate_path(space, once);
  }
}

TEST_CASE("optimizer is deterministic given the seed") {
  const auto space = test_support::top_space(test_support::scene("crossing_disks"));
  ShortcutOptimizer opt;
  const Path p{2, {Config({0.0, 0.0}), Config({0.6, 0.0}), Config({1.0, 0.2}), Config({1.0, 1.0})}};
  Rng a(9);
  Rng b(9);
  CHECK(opt.optimize(space, p, a).waypoints == opt.optimize(space, p, b).waypoints);
}

TEST_CASE("deformability on crossing disks") {
  const auto space = test_support::top_space(test_support::scene("crossing_disks"));
  const Path a = crossing_path(true);
  const Path b = crossing_path(false);
  CHECK(is_deformable(space, a, a));
  CHECK_FALSE(is_deformable(space, a, b));
  CHECK(is_deformable(space, a, b) == is_deformable(space, b, a));
  const Path a2{2, {Config({0.0, 0.0}), Config({0.9, 0.05}), Config({1.0, 1.0})}};
  CHECK(is_deformable(space, a, a2));
  const Path other_end{2, {Config({0.0, 0.0}), Config({1.0, 0.0})}};
  CHECK_THROWS_AS(is_deformable(space, a, other_end), Error);
  ShortcutOptimizer opt;
  Rng rng(4);
  CHECK(paths_equivalent(space, opt, a, a2, rng));
  CHECK_FALSE(paths_equivalent(space, opt, a, b, rng));
}

TEST_CASE("two zig-zags in free space are equivalent") {
  const auto space = test_support::top_space(test_support::unit_square());
  ShortcutOptimizer opt;
  Rng draws(8);
  Rng rng(8);
  CHECK(paths_equivalent(space, opt, zigzag(space, draws, 3), zigzag(space, draws, 5), rng));
}

TEST_CASE("oracle finds one minimum in a free square and is deterministic") {
  const auto space = test_support::top_space(test_support::unit_square());
  ShortcutOptimizer opt;
  OracleSettings s;
  s.starts = 20;
  Rng rng(1);
  const auto result = multistart_oracle(space, opt, s, rng);
  CHECK(result.minima.size() == 1);
  CHECK(result.feasible_starts == 20);
  Rng again(1);
  const auto second = multistart_oracle(space, opt, s, again);
  REQUIRE(second.minima.size() == result.minima.size());
  CHECK(second.minima[0].path.waypoints == result.minima[0].path.waypoints);
}

TEST_CASE("oracle finds the two crossing orders") {
  const auto space = test_support::top_space(test_support::scene("crossing_disks"));
  ShortcutOptimizer opt;
  OracleSettings s;
  Rng rng(2024);
  const auto result = multistart_oracle(space, opt, s, rng);
  CHECK(result.minima.size() == 2);
  for (std::size_t i = 1; i < result.minima.size(); ++i) {
    CHECK(result.minima[i - 1].cost <= result.minima[i].cost);
  }
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "explorer/error.hpp"
#include "support.hpp"

using namespace explorer;

TEST_CASE("crossing disks composite space") {
  const auto space = test_support::top_space(test_support::scene("crossing_disks"));
  CHECK(space.dimension() == 2);
  CHECK(space.measure() == doctest::Approx(std::sqrt(2.0)));
  CHECK(space.resolution() == doctest::Approx(0.01 * std::sqrt(2.0)));
  CHECK(space.start() == Config({0.0, 0.0}));
  CHECK(space.goal() == Config({1.0, 1.0}));
  CHECK_FALSE(space.is_config_feasible(Config({0.5, 0.5})));
  CHECK(space.is_config_feasible(Config({0.0, 1.0})));
  CHECK_FALSE(space.is_segment_feasible(space.start(), space.goal()));
  CHECK(space.is_segment_feasible(Config({0.0, 0.0}), Config({0.0, 1.0})));
}

TEST_CASE("segment check is symmetric") {
  const auto space = test_support::top_space(test_support::scene("solovey_tee"));
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    const Config a = space.sample_uniform(rng);
    const Config b = space.perturb(a, 0.2 * space.measure(), rng);
    CHECK(space.is_segment_feasible(a, b) == space.is_segment_feasible(b, a));
  }
}

TEST_CASE("SE2 metric wraps the angle and weights it") {
  const auto space = test_support::top_space(test_support::scene("rigid_bar"));
  const double w = space.components()[0].angle_weight;
  CHECK(w == doctest::Approx(0.15 * std::sqrt(2.0)));
  const Config a({0.5, 0.5, 3.0, 0.5, 0.5});
  const Config b({0.5, 0.5, -3.0, 0.5, 0.5});
  CHECK(space.distance(a, b) == doctest::Approx(w * (2 * std::numbers::pi - 6.0)));
  const Config mid = space.interpolate(a, b, 0.5);
  CHECK(std::abs(std::abs(mid[2]) - std::numbers::pi) < 1e-9);
  CHECK(space.interpolate(a, b, 0.0) == a);
  CHECK(space.interpolate(a, b, 1.0) == b);
}

TEST_CASE("metric properties on random draws") {
  const auto space = test_support::top_space(test_support::scene("rigid_bar"));
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const Config a = space.sample_uniform(rng);
    const Config b = space.sample_uniform(rng);
    const Config c = space.sample_uniform(rng);
    CHECK(space.contains(a));
    CHECK(space.distance(a, a) == 0.0);
    CHECK(space.distance(a, b) == doctest::Approx(space.distance(b, a)));
    CHECK(space.distance(a, c) <= space.distance(a, b) + space.distance(b, c) + 1e-12);
    const Config p = space.perturb(a, 0.05, rng);
    CHECK(space.contains(p));
    CHECK(space.distance(a, p) <= 0.05 + 1e-12);
  }
}

TEST_CASE("config json enforces dimension") {
  const auto space = test_support::top_space(test_support::scene("crossing_disks"));
  const Config x({0.25, 0.75});
  CHECK(config_from_json(space, config_to_json(x)) == x);
  try {
    config_from_json(space, nlohmann::json::parse("[0.1, 0.2, 0.3]"));
    FAIL("accepted a wrong-size config");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

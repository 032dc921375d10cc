#include "doctest.h"
#include "explorer/error.hpp"
#include "support.hpp"

using namespace explorer;

namespace {

ErrorKind bundle_error(const std::string& scene, const std::string& text) {
  try {
    parse_bundle(text, test_support::scene(scene));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("bundle was accepted");
  return ErrorKind::Schema;
}

}  // namespace

TEST_CASE("crossing disks bundle infers Identity and RemoveRobot") {
  const auto seq = test_support::bundle("crossing_disks", "crossing_disks");
  REQUIRE(seq.size() == 2);
  CHECK(seq.level(1).dimension() == 1);
  CHECK(seq.level(2).dimension() == 2);
  const auto& m = seq.mappings(1);
  REQUIRE(m.size() == 2);
  CHECK(m[0].kind == MappingKind::Identity);
  CHECK(m[1].kind == MappingKind::RemoveRobot);
  CHECK(seq.fiber_dimension(1) == 1);
  CHECK(seq.project(1, Config({0.3, 0.8})) == Config({0.3}));
}

TEST_CASE("Solovey tee bundles have three levels") {
  CHECK(test_support::bundle("solovey_tee", "solovey_tee_321").size() == 3);
  CHECK(test_support::bundle("solovey_tee", "solovey_tee_123").size() == 3);
  CHECK(single_level_bundle(test_support::scene("solovey_tee")).size() == 1);
}

TEST_CASE("SE2 to R2 projection and lift") {
  const auto seq = test_support::bundle("rigid_bar", "rigid_bar_inscribed");
  CHECK(seq.mappings(1)[0].kind == MappingKind::SE2toR2);
  CHECK(seq.mappings(1)[1].kind == MappingKind::Identity);
  const Config up({0.3, 0.7, 1.2, 0.5, 0.5});
  CHECK(seq.project(1, up) == Config({0.3, 0.7, 0.5, 0.5}));
  CHECK(seq.lift(1, Config({0.3, 0.7, 0.5, 0.5}), Config({1.2})) == up);
  CHECK(seq.level(1).components()[0].shape.radius == doctest::Approx(0.15));
  CHECK_THROWS_AS(seq.lift(1, Config({0.3, 0.7}), Config({1.2})), Error);
}

TEST_CASE("block mappings") {
  const std::vector<double> up{0.3, 0.7, 1.2};
  CHECK(project_block(MappingKind::SE2toR2, up, 2) == std::vector<double>{0.3, 0.7});
  CHECK(project_block(MappingKind::RNtoRM, up, 1) == std::vector<double>{0.3});
  CHECK(project_block(MappingKind::RemoveRobot, up, 0).empty());
  CHECK(project_block(MappingKind::Identity, up, 3) == up);
  const std::vector<double> base{};
  const std::vector<double> fib{0.1, 0.2};
  CHECK(lift_block(MappingKind::RemoveRobot, base, fib) == fib);
}

TEST_CASE("project after lift is the identity") {
  for (auto [scene, bundle] : {std::pair{"crossing_disks", "crossing_disks"},
                               std::pair{"solovey_tee", "solovey_tee_321"},
                               std::pair{"bhattacharya_square", "bhattacharya_square"},
                               std::pair{"rigid_bar", "rigid_bar_inscribed"}}) {
    const auto seq = test_support::bundle(scene, bundle);
    Rng rng(11);
    for (int k = 1; k < seq.size(); ++k) {
      for (int i = 0; i < 1000; ++i) {
        const Config base = seq.level(k).sample_uniform(rng);
        const Config fiber = seq.sample_fiber(k, rng);
        const Config up = seq.lift(k, base, fiber);
        REQUIRE(up.size() == static_cast<std::size_t>(seq.level(k + 1).dimension()));
        REQUIRE(seq.project(k, up) == base);
      }
    }
  }
}

TEST_CASE("path projection merges duplicates") {
  const auto seq = test_support::bundle("crossing_disks", "crossing_disks");
  Path p{2, {Config({0.0, 0.0}), Config({0.0, 0.5}), Config({0.0, 1.0}), Config({1.0, 1.0})}};
  const Path q = seq.project(1, p);
  CHECK(q.level == 1);
  REQUIRE(q.size() == 2);
  CHECK(q.front() == Config({0.0}));
  CHECK(q.back() == Config({1.0}));
  Path only_r2{2, {Config({0.0, 0.0}), Config({0.0, 1.0})}};
  CHECK(seq.project(1, only_r2).size() == 1);
}

TEST_CASE("bundle validation errors") {
  CHECK(bundle_error("crossing_disks", R"({"levels": [["r1"], ["r1", "r9"]]})") ==
        ErrorKind::RobotUnknown);
  CHECK(bundle_error("crossing_disks", R"({"levels": [["r1"]]})") == ErrorKind::Validation);
  CHECK(bundle_error("crossing_disks", R"({"levels": [["r1", "r2"], ["r1", "r2"]]})") ==
        ErrorKind::Validation);
  CHECK(bundle_error("crossing_disks", R"({"levels": [["r2", "r1"], ["r1"], ["r1", "r2"]]})") ==
        ErrorKind::Validation);
  CHECK(bundle_error("crossing_disks", R"({"lvls": []})") == ErrorKind::Schema);
  CHECK(bundle_error("rigid_bar",
                     R"({"levels": [[{"robot": "bar", "space": "SE3"}, "puck"], ["bar", "puck"]]})") ==
        ErrorKind::UnsupportedMapping);
  CHECK(parse_bundle(R"({"levels": [["puck"], [{"robot": "bar", "space": "R2"}, "puck"],
                                   ["bar", "puck"]]})",
                    test_support::scene("rigid_bar"))
            .size() == 3);
}

TEST_CASE("admissibility reports") {
  Rng rng(5);
  for (auto [scene, bundle] : {std::pair{"crossing_disks", "crossing_disks"},
                               std::pair{"solovey_tee", "solovey_tee_321"},
                               std::pair{"solovey_tee", "solovey_tee_123"},
                               std::pair{"bhattacharya_square", "bhattacharya_square"},
                               std::pair{"rigid_bar", "rigid_bar_inscribed"}}) {
    CAPTURE(bundle);
    const auto seq = test_support::bundle(scene, bundle);
    for (int k = 1; k < seq.size(); ++k) {
      const auto report = check_admissibility(seq, k, 1000, rng);
      CHECK(report.samples == 1000);
      CHECK(report.passed());
    }
  }
  const auto circ = test_support::bundle("rigid_bar", "rigid_bar_circumscribed");
  const auto report = check_admissibility(circ, 1, 1000, rng);
  CHECK_FALSE(report.passed());
  CHECK_FALSE(report.counterexamples.empty());
}

#include <doctest.h>

#include "explorer/error.hpp"
#include "explorer/explorer.hpp"
#include "explorer/io.hpp"
#include "support.hpp"

using namespace explorer;
using nlohmann::json;

namespace {

json fixture(const std::string& rel) { return json::parse(read_file(fixture_path(rel))); }

Session crossing(std::uint64_t seed) {
  return new_session(fixture("scenes/crossing_disks.json"), fixture("bundles/crossing_disks.json"),
                     ExplorerParams{}, seed);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("new_session") {
  SUBCASE("crossing disks has two seeded levels") {
    const Session s = crossing(7);
    CHECK(s.levels() == 2);
    for (int k = 1; k <= 2; ++k) {
      CHECK(s.roadmap(k).sparse.graph.vertex_count() == 2);
      CHECK(s.roadmap(k).dense.graph.vertex_count() == 2);
    }
    CHECK(s.tree().size() == 1);
  }
  SUBCASE("no bundle gives one level") {
    const Session s =
        new_session(fixture("scenes/crossing_disks.json"), json(nullptr), ExplorerParams{}, 1);
    CHECK(s.levels() == 1);
  }
  SUBCASE("bundle naming an unknown robot") {
    CHECK(kind_of([] {
            new_session(fixture("scenes/crossing_disks.json"),
                        json::parse(R"({"levels": [["r9"], ["r1", "r2"]]})"), ExplorerParams{}, 1);
          }) == ErrorKind::RobotUnknown);
  }
  SUBCASE("top level missing a robot") {
    CHECK(kind_of([] {
            new_session(fixture("scenes/crossing_disks.json"),
                        json::parse(R"({"levels": [["r1"]]})"), ExplorerParams{}, 1);
          }) == ErrorKind::Validation);
  }
}

TEST_CASE("params") {
  const ExplorerParams d;
  CHECK(d.tree.n == 5);
  CHECK(d.roadmap.delta_fraction == 0.15);
  CHECK(d.roadmap.rho_fraction == 0.05);
  CHECK(d.roadmap.epsilon_fraction == 1e-3);
  const auto round = ExplorerParams::from_json(d.to_json());
  CHECK(round.to_json() == d.to_json());
  CHECK(ExplorerParams::from_json(json::parse(R"({"n": 2})")).tree.n == 2);
  CHECK(kind_of([] { ExplorerParams::from_json(json::parse(R"({"n": 0})")); }) ==
        ErrorKind::Validation);
  CHECK(kind_of([] { ExplorerParams::from_json(json::parse(R"({"rho_fraction": -1})")); }) ==
        ErrorKind::Validation);
  CHECK(kind_of([] { ExplorerParams::from_json(json::parse(R"({"p_path": "x"})")); }) ==
        ErrorKind::Schema);
}

TEST_CASE("expand") {
  Session s = crossing(7);
  SUBCASE("root grows level 1 and gains a child") {
    const auto r = s.expand(s.tree().root(), Ptc::sample_budget(2000));
    CHECK(r.level == 1);
    CHECK(r.grow.drawn == 2000);
    CHECK(r.new_nodes.size() >= 1);
    CHECK_FALSE(r.no_path);
    CHECK(s.tree().node(0).status == NodeStatus::Expanded);
    CHECK(s.events().size() == 1);
    CHECK(s.roadmap(2).dense.graph.vertex_count() == 2);
  }
  SUBCASE("top-level nodes cannot be expanded") {
    s.expand(0, Ptc::sample_budget(2000));
    const NodeId l1 = s.tree().level_nodes(1).front();
    s.expand(l1, Ptc::sample_budget(2000));
    const NodeId top = s.tree().level_nodes(2).front();
    CHECK(kind_of([&] { s.expand(top, Ptc::sample_budget(10)); }) == ErrorKind::LevelExhausted);
  }
  SUBCASE("unknown node") {
    CHECK(kind_of([&] { s.expand(99, Ptc::sample_budget(10)); }) == ErrorKind::NodeUnknown);
  }
  SUBCASE("empty budget") {
    CHECK(kind_of([&] { s.expand(0, Ptc::sample_budget(0)); }) == ErrorKind::Validation);
  }
  SUBCASE("too few samples reports no path instead of failing") {
    const auto r = s.expand(0, Ptc::sample_budget(1));
    CHECK(r.no_path);
    CHECK(r.new_nodes.empty());
  }
  SUBCASE("a time budget ends near its deadline") {
    const auto r = s.expand(0, Ptc::time_budget(0.2));
    CHECK(r.seconds < 2.0);
    CHECK(r.grow.drawn > 0);
  }
}

TEST_CASE("determinism and replay") {
  auto run = [](std::uint64_t seed) {
    Session s = crossing(seed);
    s.expand(0, Ptc::sample_budget(1500));
    s.expand(s.tree().level_nodes(1).front(), Ptc::sample_budget(1500));
    return s;
  };
  const Session a = run(11);
  const Session b = run(11);
  CHECK(a.snapshot().dump() == b.snapshot().dump());

  SUBCASE("save and load reproduce the tree") {
    const json doc = a.save();
    const Session c = Session::load(json::parse(doc.dump()));
    CHECK(c.snapshot().dump() == a.snapshot().dump());
    CHECK(c.save().dump() == doc.dump());
  }
  SUBCASE("a time-budget expansion replays from its sample count") {
    Session s = crossing(5);
    s.expand(0, Ptc::time_budget(0.1));
    const Session again = Session::load(s.save());
    CHECK(again.snapshot().dump() == s.snapshot().dump());
  }
  SUBCASE("not a session document") {
    CHECK(kind_of([] { Session::load(json::parse(R"({"format": "x"})")); }) == ErrorKind::Schema);
  }
}

TEST_CASE("run_batch") {
  SUBCASE("crossing disks ends with two leaf minima") {
    Session s = crossing(7);
    const auto r = run_batch(s, BatchPolicy::BreadthFirst, Ptc::sample_budget(2000), 100);
    CHECK(r.reports.size() == 2);
    CHECK(s.tree().level_nodes(2).size() == 2);
    CHECK(check_tree(s.tree(), s.bundle(), s.optimizer()).empty());
    CHECK(r.snapshot == s.snapshot());
  }
  SUBCASE("max_nodes = 1 expands once") {
    Session s = crossing(7);
    CHECK(run_batch(s, BatchPolicy::BestFirst, Ptc::sample_budget(2000), 1).reports.size() == 1);
  }
  SUBCASE("policies by name") {
    CHECK(batch_policy_from_string("best_first") == BatchPolicy::BestFirst);
    CHECK(batch_policy_from_string(to_string(BatchPolicy::BreadthFirst)) ==
          BatchPolicy::BreadthFirst);
    CHECK(kind_of([] { batch_policy_from_string("random"); }) == ErrorKind::Validation);
  }
}

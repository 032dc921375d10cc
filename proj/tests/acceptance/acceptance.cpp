// Acceptance run: one PASS/FAIL line per primary criterion, exit 1 if any
// fails. `--only N` runs a single criterion (7 and 9 then audit only the
// runs made along the way).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "explorer/cli.hpp"
#include "explorer/error.hpp"
#include "explorer/explorer.hpp"
#include "explorer/io.hpp"
#include "explorer/service.hpp"

using namespace explorer;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 20;
constexpr long kCrossingSamples = 2000;
constexpr long kBhattacharyaSamples = 5000;
constexpr long kSoloveySamples = 20000;

json fixture(const std::string& rel) { return json::parse(read_file(fixture_path(rel))); }

Session session(const std::string& scene, const std::string& bundle, std::uint64_t seed) {
  return new_session(fixture("scenes/" + scene + ".json"),
                     bundle.empty() ? json(nullptr) : fixture("bundles/" + bundle + ".json"),
                     ExplorerParams{}, seed);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Tree and start/goal audit over every session the run builds.
struct Audit {
  int sessions = 0;
  std::size_t nodes = 0;
  std::vector<std::string> violations;
  std::vector<std::string> lost_endpoints;

  void add(const Session& s, const std::string& label) {
    ++sessions;
    nodes += s.tree().size() - 1;
    for (const auto& v : check_tree(s.tree(), s.bundle(), s.optimizer(), s.params().tree.rungs)) {
      violations.push_back(label + " node " + std::to_string(v.node) + ": " + v.what);
    }
    for (int k = 1; k <= s.levels(); ++k) {
      const Graph& g = s.roadmap(k).sparse.graph;
      if (!g.alive(0) || !g.alive(1)) lost_endpoints.push_back(label + " level " + std::to_string(k));
    }
  }
};

Audit audit;

/// Which of two robots passes the crossing point of their start-goal lines
/// first along the animated trajectory: -1 for `a`, 1 for `b`, 0 if unclear.
int crossing_order(const CompositeSpace& space, const Path& path, const std::string& a,
                   const std::string& b) {
  const json traj = trajectory_json(space, path, 200);
  const json* pa = nullptr;
  const json* pb = nullptr;
  for (const auto& r : traj["robots"]) {
    if (r["name"] == a) pa = &r["poses"];
    if (r["name"] == b) pb = &r["poses"];
  }
  if (pa == nullptr || pb == nullptr) return 0;
  auto xy = [](const json& pose) { return Vec2{pose[0].get<double>(), pose[1].get<double>()}; };
  const Vec2 p = xy(pa->front()), r = xy(pa->back()) - p;
  const Vec2 q = xy(pb->front()), s = xy(pb->back()) - q;
  const double den = r.x * s.y - r.y * s.x;
  if (std::abs(den) < 1e-12) return 0;
  const double t = ((q.x - p.x) * s.y - (q.y - p.y) * s.x) / den;
  const Vec2 cross{p.x + t * r.x, p.y + t * r.y};
  auto closest = [&](const json& poses) {
    std::size_t best = 0;
    double d = 1e300;
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const Vec2 v = xy(poses[i]) - cross;
      const double di = std::hypot(v.x, v.y);
      if (di < d) {
        d = di;
        best = i;
      }
    }
    return best;
  };
  const std::size_t ta = closest(*pa), tb = closest(*pb);
  return ta < tb ? -1 : (tb < ta ? 1 : 0);
}

/// Ids of `ids` forming the largest set found greedily whose members are
/// pairwise non-deformable.
std::vector<NodeId> non_deformable_set(const Session& s, int level, const std::vector<NodeId>& ids) {
  std::vector<NodeId> chosen;
  for (NodeId id : ids) {
    bool apart = true;
    for (NodeId c : chosen) {
      if (is_deformable(s.bundle().level(level), s.tree().node(id).path, s.tree().node(c).path)) {
        apart = false;
        break;
      }
    }
    if (apart) chosen.push_back(id);
  }
  return chosen;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "explorer");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out != nullptr) *out = o.str() + e.str();
  return code;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("explorer_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1
Outcome crossing_disks() {
  const auto t0 = std::chrono::steady_clock::now();
  Session s = session("crossing_disks", "crossing_disks", 7);
  run_batch(s, BatchPolicy::BreadthFirst, Ptc::sample_budget(kCrossingSamples), 100);
  const double secs = seconds_since(t0);
  audit.add(s, "crossing_disks seed 7");
  const auto top = s.tree().level_nodes(2);
  const auto apart = non_deformable_set(s, 2, top);
  std::set<int> orders;
  for (NodeId id : top) orders.insert(crossing_order(s.bundle().level(2), s.tree().node(id).path, "r1", "r2"));
  const bool pass = top.size() == 2 && apart.size() == 2 && orders == std::set<int>{-1, 1} && secs < 30.0;

  int others = 0;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Session o = session("crossing_disks", "crossing_disks", seed);
    run_batch(o, BatchPolicy::BreadthFirst, Ptc::sample_budget(kCrossingSamples), 100);
    audit.add(o, "crossing_disks seed " + std::to_string(seed));
    others += o.tree().level_nodes(2).size() == 2 ? 1 : 0;
  }
  std::ostringstream d;
  d << top.size() << " composite minima, " << apart.size() << " pairwise non-deformable, "
    << (orders == std::set<int>{-1, 1} ? "both" : "not both") << " disk orders, " << secs
    << " s (seeds 100-109: " << others << "/10 with exactly 2)";
  return {pass, d.str()};
}

// 2
Outcome oracle_equivalence() {
  const fs::path batch = scratch("c2_batch");
  const fs::path oracle = scratch("c2_oracle");
  std::string log;
  const int b = cli({"batch", "--scene", "crossing_disks", "--bundle", "crossing_disks", "--seed", "7",
                     "--samples", std::to_string(kCrossingSamples), "--out", batch.string()},
                    &log);
  if (b != kExitOk) return {false, "batch exited " + std::to_string(b) + ": " + log};
  const int c = cli({"oracle", "--scene", "crossing_disks", "--seed", "7", "--starts", "200", "--out",
                     oracle.string(), "--compare", batch.string()},
                    &log);
  json doc;
  if (fs::exists(oracle / "oracle.json")) doc = json::parse(read_file(oracle / "oracle.json"));
  const std::size_t clusters = doc.is_object() ? doc.value("clusters", std::size_t{0}) : 0;

  const auto space = single_level_bundle(std::make_shared<const Scene>(
                                             load_scene(fixture("scenes/crossing_disks.json"))))
                         .level(1);
  ShortcutOptimizer opt;
  int two = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    two += multistart_oracle(space, opt, OracleSettings{}, rng).minima.size() == 2 ? 1 : 0;
  }
  fs::remove_all(batch);
  fs::remove_all(oracle);
  std::ostringstream d;
  d << clusters << " oracle clusters, compare exit " << c << " (2 clusters on " << two
    << "/50 oracle seeds)";
  return {clusters == 2 && c == kExitOk, d.str()};
}

// 3
Outcome solovey() {
  int ok123 = 0, ok321 = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto t0 = std::chrono::steady_clock::now();
    Session a = session("solovey_tee", "solovey_tee_123", seed);
    run_batch(a, BatchPolicy::BreadthFirst, Ptc::sample_budget(kSoloveySamples), 6);
    worst = std::max(worst, seconds_since(t0));
    audit.add(a, "solovey_123 seed " + std::to_string(seed));
    ok123 += a.tree().level_nodes(3).empty() ? 0 : 1;

    t0 = std::chrono::steady_clock::now();
    Session b = session("solovey_tee", "solovey_tee_321", seed);
    run_batch(b, BatchPolicy::BreadthFirst, Ptc::sample_budget(kSoloveySamples), 100);
    worst = std::max(worst, seconds_since(t0));
    audit.add(b, "solovey_321 seed " + std::to_string(seed));
    ok321 += non_deformable_set(b, 3, b.tree().level_nodes(3)).size() >= 2 ? 1 : 0;
  }
  const int need = (kSeeds * 4 + 4) / 5;
  std::ostringstream d;
  d << "(123) >=1 minimum on " << ok123 << "/" << kSeeds << ", (321) >=2 non-deformable on "
    << ok321 << "/" << kSeeds << ", slowest seed " << worst << " s";
  return {ok123 >= need && ok321 >= need && worst < 300.0, d.str()};
}

// 4
Outcome bhattacharya() {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    Session s = session("bhattacharya_square", "bhattacharya_square", seed);
    s.expand(s.tree().root(), Ptc::sample_budget(kBhattacharyaSamples));
    audit.add(s, "bhattacharya seed " + std::to_string(seed));
    const auto& base = s.bundle().level(1);
    const auto ids = s.tree().level_nodes(1);
    bool found = false;
    for (std::size_t i = 0; i < ids.size() && !found; ++i) {
      for (std::size_t j = i + 1; j < ids.size() && !found; ++j) {
        const Path& a = s.tree().node(ids[i]).path;
        const Path& b = s.tree().node(ids[j]).path;
        const int oa = crossing_order(base, a, "r1", "r2");
        const int ob = crossing_order(base, b, "r1", "r2");
        found = oa != 0 && ob != 0 && oa != ob && !is_deformable(base, a, b);
      }
    }
    ok += found ? 1 : 0;
  }
  std::ostringstream d;
  d << "differing crossing orders on " << ok << "/" << kSeeds << " seeds (" << kBhattacharyaSamples
    << " samples)";
  return {ok >= (kSeeds * 4 + 4) / 5, d.str()};
}

// 5
Outcome optimizer_properties() {
  const auto space = single_level_bundle(std::make_shared<const Scene>(
                                             load_scene(fixture("scenes/unit_square.json"))))
                         .level(1);
  const ShortcutOptimizer opt;
  ShortcutSettings one_round = opt.settings();
  one_round.max_rounds = 1;
  one_round.patience = 1;
  const ShortcutOptimizer step(one_round);
  Rng draws(42);
  int monotone = 0, idempotent = 0, straight = 0, valid = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int bends = 3 + i % 5;
    Path p{1, {space.start()}};
    for (int k = 1; k <= bends; ++k) {
      const double t = static_cast<double>(k) / (bends + 1);
      const double x = std::clamp(t + draws.uniform(-0.1, 0.1), 0.0, 1.0);
      const double y = std::clamp(t + (k % 2 == 0 ? 0.25 : -0.25) + draws.uniform(-0.05, 0.05), 0.0, 1.0);
      p.waypoints.push_back(Config({x, y}));
    }
    p.waypoints.push_back(space.goal());
    try {
      validate_path(space, p);
    } catch (const Error&) {
      continue;
    }
    ++valid;
    // round by round
    Rng rr(static_cast<std::uint64_t>(i));
    Path cur = p;
    bool mono = true;
    for (int r = 0; r < 200; ++r) {
      const double before = cost(space, cur);
      cur = step.optimize(space, cur, rr);
      const double after = cost(space, cur);
      if (after > before + 1e-12) mono = false;
      if (before - after <= opt.tolerance() * before) break;
    }
    monotone += mono ? 1 : 0;

    Rng rng(static_cast<std::uint64_t>(1000 + i));
    const Path once = opt.optimize(space, p, rng);
    const Path twice = opt.optimize(space, once, rng);
    const double c1 = cost(space, once), c2 = cost(space, twice);
    idempotent += std::abs(c2 - c1) <= opt.tolerance() * c1 ? 1 : 0;
    const double gap = std::abs(c1 - std::sqrt(2.0));
    worst_gap = std::max(worst_gap, gap);
    straight += gap < 1e-3 ? 1 : 0;
  }
  std::ostringstream d;
  d << valid << " feasible zig-zags: monotone " << monotone << ", idempotent " << idempotent
    << ", within 1e-3 of sqrt(2) " << straight << " (worst gap " << worst_gap << ")";
  return {valid == 100 && monotone == 100 && idempotent == 100 && straight == 100, d.str()};
}

// 6
Outcome bundle_properties() {
  Rng rng(6);
  int failures = 0;
  auto block = [&](MappingKind kind, std::size_t up_dim, std::size_t base_dim) {
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> base(base_dim), fiber(up_dim - base_dim);
      for (auto& v : base) v = rng.uniform(-5.0, 5.0);
      for (auto& v : fiber) v = rng.uniform(-5.0, 5.0);
      const auto up = lift_block(kind, base, fiber);
      if (up.size() != up_dim || project_block(kind, up, base_dim) != base) ++failures;
    }
  };
  block(MappingKind::Identity, 3, 3);
  block(MappingKind::RemoveRobot, 2, 0);
  block(MappingKind::SE2toR2, 3, 2);
  block(MappingKind::RNtoRM, 5, 2);

  const std::vector<std::pair<std::string, std::string>> bundles = {
      {"crossing_disks", "crossing_disks"},     {"solovey_tee", "solovey_tee_123"},
      {"solovey_tee", "solovey_tee_321"},       {"bhattacharya_square", "bhattacharya_square"},
      {"rigid_bar", "rigid_bar_inscribed"}};
  std::set<MappingKind> kinds_seen;
  int admissibility = 0;
  for (const auto& [scene, name] : bundles) {
    const Session s = session(scene, name, 0);
    const BundleSequence& seq = s.bundle();
    for (int k = 1; k < seq.size(); ++k) {
      for (const auto& m : seq.mappings(k)) kinds_seen.insert(m.kind);
      for (int i = 0; i < 1000; ++i) {
        const Config base = seq.level(k).sample_uniform(rng);
        if (seq.project(k, seq.lift(k, base, seq.sample_fiber(k, rng))) != base) ++failures;
      }
      admissibility += check_admissibility(seq, k, 1000, rng).violations;
    }
  }
  std::ostringstream d;
  d << failures << " project-lift mismatches over 4 block kinds and " << bundles.size()
    << " bundles (" << kinds_seen.size() << " kinds in fixtures), " << admissibility
    << " admissibility violations";
  return {failures == 0 && admissibility == 0, d.str()};
}

// 7
Outcome tree_invariants() {
  std::ostringstream d;
  d << audit.violations.size() << " violations over " << audit.nodes << " nodes in " << audit.sessions
    << " runs";
  for (std::size_t i = 0; i < std::min<std::size_t>(audit.violations.size(), 5); ++i) {
    d << "; " << audit.violations[i];
  }
  return {audit.sessions > 0 && audit.violations.empty(), d.str()};
}

// 8
Outcome determinism() {
  auto crossing = [] {
    Session s = session("crossing_disks", "crossing_disks", 11);
    run_batch(s, BatchPolicy::BestFirst, Ptc::sample_budget(kCrossingSamples), 100);
    return s;
  };
  auto tee = [] {
    Session s = session("solovey_tee", "solovey_tee_321", 3);
    run_batch(s, BatchPolicy::BreadthFirst, Ptc::sample_budget(kSoloveySamples), 100);
    return s;
  };
  int same = 0, checks = 0;
  for (const auto& make : {std::function<Session()>(crossing), std::function<Session()>(tee)}) {
    const Session a = make();
    const Session b = make();
    audit.add(a, "determinism " + a.scene().name);
    checks += 2;
    same += a.snapshot().dump() == b.snapshot().dump() ? 1 : 0;
    same += Session::load(a.save()).snapshot().dump() == a.snapshot().dump() ? 1 : 0;
  }
  const fs::path x = scratch("c8_x"), y = scratch("c8_y");
  for (const auto& dir : {x, y}) {
    cli({"batch", "--scene", "crossing_disks", "--bundle", "crossing_disks", "--seed", "5", "--samples",
         std::to_string(kCrossingSamples), "--out", dir.string()});
  }
  for (const char* f : {"tree.json", "summary.json", "session.json"}) {
    ++checks;
    if (fs::exists(x / f) && read_file(x / f) == read_file(y / f)) ++same;
  }
  fs::remove_all(x);
  fs::remove_all(y);
  std::ostringstream d;
  d << same << "/" << checks << " byte-identical (runs, replays, batch files)";
  return {same == checks, d.str()};
}

// 9
Outcome reducible_faces() {
  auto square = [](const char* obstacles) {
    const std::string text = std::string(R"({"name": "triangle",
      "workspace": {"bounds": [[-0.1, -0.1], [1.1, 1.1]], "obstacles": )") + obstacles + R"(},
      "robots": [{"name": "a", "shape": {"type": "disk", "radius": 0.05}, "space": "R2",
                  "start": [0.0, 0.0], "goal": [1.0, 1.0]}]})";
    return single_level_bundle(std::make_shared<const Scene>(parse_scene(text))).level(1);
  };
  auto triangle = [](const CompositeSpace& space) {
    SparseGraph s;
    s.delta = 0.15 * space.measure();
    for (const Config& x : {space.start(), space.goal(), Config({0.2, 0.2}), Config({0.8, 0.2}),
                            Config({0.5, 0.45})}) {
      s.graph.add_vertex(x);
    }
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 2}, {2, 3}, {2, 4}, {4, 3}, {3, 1}}) {
      s.graph.add_edge(a, b, space.distance(s.graph.vertex(a), s.graph.vertex(b)));
    }
    s.rebuild_components();
    return s;
  };
  const auto free_space = square("[]");
  SparseGraph f = triangle(free_space);
  const auto rf = remove_reducible_faces(free_space, f);
  const bool removed = rf.vertices == 1 && !f.graph.alive(4) && f.graph.connected(0, 1);

  const auto post = square(R"([{"type": "disk", "center": [0.5, 0.3], "radius": 0.02}])");
  SparseGraph p = triangle(post);
  const auto rp = remove_reducible_faces(post, p);
  const bool kept = rp.vertices + rp.edges == 0 && p.graph.alive(4);

  std::ostringstream d;
  d << "free triangle apex " << (removed ? "removed" : "kept") << ", straddling apex "
    << (kept ? "kept" : "removed") << ", start/goal lost in " << audit.lost_endpoints.size() << " of "
    << audit.sessions << " runs";
  return {removed && kept && audit.lost_endpoints.empty() && audit.sessions > 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") only = std::atoi(argv[i + 1]);
  }
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, crossing_disks}, {2, oracle_equivalence}, {3, solovey},        {4, bhattacharya},
      {8, determinism},    {5, optimizer_properties}, {6, bundle_properties}, {7, tree_invariants},
      {9, reducible_faces}};
  const char* names[] = {"",
                         "crossing disks",
                         "oracle equivalence",
                         "Solovey tee",
                         "Bhattacharya square base level",
                         "optimizer properties",
                         "bundle properties",
                         "tree invariants",
                         "determinism",
                         "reducible faces"};
  std::vector<std::string> lines(10);
  bool all = true;
  for (const auto& [id, run] : criteria) {
    if (only != 0 && id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " " << id << " " << names[id] << ": " << o.detail << " ["
         << seconds_since(t0) << " s]";
    lines[static_cast<std::size_t>(id)] = line.str();
    all = all && o.pass;
  }
  for (const auto& l : lines) {
    if (!l.empty()) std::cout << l << "\n";
  }
  return all ? 0 : 1;
}

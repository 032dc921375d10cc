#include "explorer/explorer.hpp"

#include <algorithm>
#include <chrono>

#include "explorer/error.hpp"
#include "explorer/scene.hpp"

namespace explorer {

using nlohmann::json;

namespace {

template <typename T>
void read_positive(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number()) throw Error(ErrorKind::Schema, std::string(key) + ": expected a number", key);
  if (!(v.get<double>() > 0.0)) {
    throw Error(ErrorKind::Validation, std::string(key) + " must be positive", key);
  }
  out = v.get<T>();
}

}  // namespace

json ExplorerParams::to_json() const {
  return {{"n", tree.n},
          {"delta_fraction", roadmap.delta_fraction},
          {"rho_fraction", roadmap.rho_fraction},
          {"epsilon_fraction", roadmap.epsilon_fraction},
          {"p_path", roadmap.p_path},
          {"k_near", roadmap.k_near},
          {"shortcut_attempts", optimizer.shortcut_attempts},
          {"tolerance", optimizer.tolerance},
          {"max_rounds", optimizer.max_rounds},
          {"patience", optimizer.patience},
          {"rungs", tree.rungs},
          {"alternative_rounds", tree.alternative_rounds},
          {"max_optimized", tree.max_optimized},
          {"bound_factor", tree.limits.bound_factor},
          {"max_expansions", tree.limits.max_expansions}};
}

ExplorerParams ExplorerParams::from_json(const json& doc) {
  ExplorerParams p;
  if (doc.is_null()) return p;
  if (!doc.is_object()) throw Error(ErrorKind::Schema, "params: expected an object", "params");
  read_positive(doc, "n", p.tree.n);
  read_positive(doc, "delta_fraction", p.roadmap.delta_fraction);
  read_positive(doc, "rho_fraction", p.roadmap.rho_fraction);
  read_positive(doc, "epsilon_fraction", p.roadmap.epsilon_fraction);
  read_positive(doc, "p_path", p.roadmap.p_path);
  read_positive(doc, "k_near", p.roadmap.k_near);
  read_positive(doc, "shortcut_attempts", p.optimizer.shortcut_attempts);
  read_positive(doc, "tolerance", p.optimizer.tolerance);
  read_positive(doc, "max_rounds", p.optimizer.max_rounds);
  read_positive(doc, "patience", p.optimizer.patience);
  read_positive(doc, "rungs", p.tree.rungs);
  read_positive(doc, "alternative_rounds", p.tree.alternative_rounds);
  read_positive(doc, "max_optimized", p.tree.max_optimized);
  read_positive(doc, "bound_factor", p.tree.limits.bound_factor);
  read_positive(doc, "max_expansions", p.tree.limits.max_expansions);
  if (p.roadmap.p_path > 1.0) throw Error(ErrorKind::Validation, "p_path must be at most 1", "p_path");
  return p;
}

json ExpansionReport::to_json() const {
  return {{"iteration", iteration},
          {"node", node},
          {"level", level},
          {"new_nodes", new_nodes},
          {"samples_drawn", grow.drawn},
          {"samples_feasible", grow.feasible},
          {"sparse_added", grow.sparse_added},
          {"removed_vertices", reduction.vertices},
          {"removed_edges", reduction.edges},
          {"no_path", no_path}};
}

Session::Session(BundleSequence seq, ExplorerParams params, std::uint64_t seed)
    : seq_(std::move(seq)), params_(params), seed_(seed), optimizer_(params.optimizer) {
  for (int k = 1; k <= seq_.size(); ++k) {
    roadmaps_.push_back(init_level(seq_.level(k), k, params_.roadmap));
  }
}

const LevelRoadmap& Session::roadmap(int level) const {
  if (level < 1 || level > seq_.size()) {
    throw Error(ErrorKind::Validation, "no level " + std::to_string(level), "level");
  }
  return roadmaps_[static_cast<std::size_t>(level - 1)];
}

ExpansionReport Session::expand(NodeId id, const Ptc& ptc, const std::atomic<bool>* cancel,
                                std::atomic<long>* progress) {
  const MinimaNode& node = tree_.node(id);
  if (node.level >= seq_.size()) {
    throw Error(ErrorKind::LevelExhausted,
                "node " + std::to_string(id) + " is on the top level; nothing above to grow",
                "node_id");
  }
  if ((ptc.kind == Ptc::Kind::Samples && ptc.samples <= 0) ||
      (ptc.kind == Ptc::Kind::Seconds && !(ptc.seconds > 0.0))) {
    throw Error(ErrorKind::Validation, "budget must be positive", "budget");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int level = node.level + 1;
  const Path selected = node.path;
  Rng rng(Rng::mix(seed_ ^ Rng::mix(static_cast<std::uint64_t>(iteration_))));

  ExpansionReport report;
  report.iteration = iteration_;
  report.node = id;
  report.level = level;
  LevelRoadmap& target = roadmaps_[static_cast<std::size_t>(level - 1)];
  const LevelRoadmap* base = level > 1 ? &roadmaps_[static_cast<std::size_t>(level - 2)] : nullptr;
  Rng grow_rng = rng.split();
  report.grow = grow(seq_, target, base, level > 1 ? &selected : nullptr, params_.roadmap, ptc,
                     grow_rng, cancel, progress);
  report.reduction = remove_reducible_faces(seq_.level(level), target.sparse, params_.tree.rungs);
  try {
    report.new_nodes =
        update_tree(tree_, seq_, level, target.sparse, id, optimizer_, params_.tree, rng, iteration_);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoPathFound) throw;
    report.no_path = true;
  }
  tree_.mark_expanded(id);
  events_.push_back({iteration_, id, report.grow.drawn});
  ++iteration_;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

json Session::save() const {
  json events = json::array();
  for (const auto& e : events_) {
    events.push_back({{"iteration", e.iteration}, {"node", e.node}, {"samples", e.samples}});
  }
  return {{"format", "explorer-session"},
          {"version", 1},
          {"scene", scene_to_json(seq_.scene())},
          {"bundle", seq_.to_json()},
          {"params", params_.to_json()},
          {"seed", seed_},
          {"events", events}};
}

Session Session::load(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "explorer-session") {
    throw Error(ErrorKind::Schema, "not a session document", "format");
  }
  std::uint64_t seed = 0;
  try {
    seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Schema, "seed: expected an unsigned integer", "seed");
  }
  Session s = new_session(doc.at("scene"), doc.at("bundle"),
                          ExplorerParams::from_json(doc.value("params", json(nullptr))), seed);
  for (const auto& e : doc.value("events", json::array())) {
    const auto node = e.at("node").get<NodeId>();
    const auto samples = e.at("samples").get<long>();
    s.expand(node, Ptc::sample_budget(samples));
  }
  return s;
}

Session new_session(const json& scene_doc, const json& bundle_doc, const ExplorerParams& params,
                    std::uint64_t seed) {
  auto scene = std::make_shared<const Scene>(load_scene(scene_doc));
  BundleSequence seq = bundle_doc.is_null() ? single_level_bundle(scene) : load_bundle(bundle_doc, scene);
  return Session(std::move(seq), params, seed);
}

const char* to_string(BatchPolicy p) {
  return p == BatchPolicy::BreadthFirst ? "breadth_first" : "best_first";
}

BatchPolicy batch_policy_from_string(std::string_view s) {
  if (s == "breadth_first") return BatchPolicy::BreadthFirst;
  if (s == "best_first") return BatchPolicy::BestFirst;
  throw Error(ErrorKind::Validation, "unknown policy '" + std::string(s) + "'", "policy");
}

BatchResult run_batch(Session& session, BatchPolicy policy, const Ptc& per_node,
                      std::size_t max_nodes) {
  if (max_nodes == 0) throw Error(ErrorKind::Validation, "max_nodes must be positive", "max_nodes");
  BatchResult result;
  while (result.reports.size() < max_nodes) {
    NodeId next = kNoNode;
    for (const auto& n : session.tree().nodes()) {
      if (n.status != NodeStatus::Fresh || n.level >= session.levels()) continue;
      if (next == kNoNode) {
        next = n.id;
        if (policy == BatchPolicy::BreadthFirst) break;
      } else if (n.cost < session.tree().node(next).cost) {
        next = n.id;
      }
    }
    if (next == kNoNode) break;
    result.reports.push_back(session.expand(next, per_node));
  }
  result.snapshot = session.snapshot();
  return result;
}

}  // namespace explorer

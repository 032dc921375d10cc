#include "explorer/minimatree.hpp"

#include <algorithm>
#include <tuple>

#include "explorer/error.hpp"
#include "explorer/kernels.hpp"

namespace explorer {

using nlohmann::json;

const char* to_string(NodeStatus s) {
  return s == NodeStatus::Fresh ? "fresh" : "expanded";
}

MinimaTree::MinimaTree() {
  MinimaNode root;
  root.id = 0;
  root.level = 0;
  nodes_.push_back(std::move(root));
}

const MinimaNode& MinimaTree::node(NodeId id) const {
  if (!contains(id)) throw Error(ErrorKind::NodeUnknown, "no node " + std::to_string(id), "node_id");
  return nodes_[id];
}

MinimaNode& MinimaTree::mutable_node(NodeId id) {
  if (!contains(id)) throw Error(ErrorKind::NodeUnknown, "no node " + std::to_string(id), "node_id");
  return nodes_[id];
}

std::vector<NodeId> MinimaTree::level_nodes(int level) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.level == level) out.push_back(n.id);
  }
  return out;
}

NodeId MinimaTree::add_node(NodeId parent, Path path, double cost, long iteration,
                            std::uint64_t seed) {
  MinimaNode& p = mutable_node(parent);
  if (path.level != p.level + 1) {
    throw Error(ErrorKind::Validation, "child level must be one above its parent", "level");
  }
  MinimaNode n;
  n.id = nodes_.size();
  n.level = path.level;
  n.path = std::move(path);
  n.cost = cost;
  n.parent = parent;
  n.created_iteration = iteration;
  n.optimizer_seed = seed;
  const NodeId id = n.id;
  nodes_.push_back(std::move(n));
  auto& kids = nodes_[parent].children;
  kids.push_back(id);
  std::sort(kids.begin(), kids.end(), [this](NodeId a, NodeId b) {
    return std::pair(nodes_[a].cost, a) < std::pair(nodes_[b].cost, b);
  });
  return id;
}

void MinimaTree::mark_expanded(NodeId id) { mutable_node(id).status = NodeStatus::Expanded; }

json MinimaTree::to_json() const {
  json nodes = json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"id", n.id},
                     {"level", n.level},
                     {"parent", n.parent == kNoNode ? json(nullptr) : json(n.parent)},
                     {"children", n.children},
                     {"status", to_string(n.status)},
                     {"cost", n.cost},
                     {"created_iteration", n.created_iteration},
                     {"optimizer_seed", n.optimizer_seed},
                     {"path", n.path.empty() ? json(nullptr) : path_to_json(n.path)}});
  }
  return {{"root", root()}, {"nodes", nodes}};
}

MinimaTree MinimaTree::from_json(const json& doc) {
  MinimaTree t;
  t.nodes_.clear();
  try {
    for (const auto& j : doc.at("nodes")) {
      MinimaNode n;
      n.id = j.at("id").get<NodeId>();
      if (n.id != t.nodes_.size()) throw Error(ErrorKind::Schema, "node ids must be dense", "nodes");
      n.level = j.at("level").get<int>();
      n.parent = j.at("parent").is_null() ? kNoNode : j.at("parent").get<NodeId>();
      n.children = j.at("children").get<std::vector<NodeId>>();
      n.status = j.at("status").get<std::string>() == "expanded" ? NodeStatus::Expanded
                                                                  : NodeStatus::Fresh;
      n.cost = j.at("cost").get<double>();
      n.created_iteration = j.at("created_iteration").get<long>();
      n.optimizer_seed = j.at("optimizer_seed").get<std::uint64_t>();
      if (!j.at("path").is_null()) {
        n.path.level = j.at("path").at("level").get<int>();
        for (const auto& w : j.at("path").at("waypoints")) {
          n.path.waypoints.emplace_back(w.get<std::vector<double>>());
        }
      }
      t.nodes_.push_back(std::move(n));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("tree: ") + e.what(), "tree");
  }
  if (t.nodes_.empty() || t.nodes_[0].level != 0) {
    throw Error(ErrorKind::Schema, "tree needs a level-0 root", "nodes");
  }
  return t;
}

namespace {

Path projection(const BundleSequence& seq, const Path& candidate) {
  Path proj = seq.project(candidate.level - 1, with_check_points(seq.level(candidate.level), candidate));
  if (proj.size() == 1) proj.waypoints.push_back(proj.front());
  return proj;
}

bool deformable_to_any(const CompositeSpace& space, const MinimaTree& tree,
                       const std::vector<NodeId>& ids, const Path& p, int rungs) {
  return std::any_of(ids.begin(), ids.end(), [&](NodeId id) {
    return is_deformable(space, tree.node(id).path, p, rungs);
  });
}

/// Level-k match for an already optimized level-k path, `preferred` first.
NodeId match_or_create(MinimaTree& tree, const BundleSequence& seq, const Path& projected,
                       NodeId preferred, std::uint64_t seed, const PathOptimizer& optimizer,
                       long iteration, int rungs) {
  const int k = projected.level;
  const CompositeSpace& space = seq.level(k);
  if (preferred != kNoNode && tree.node(preferred).level == k &&
      is_deformable(space, tree.node(preferred).path, projected, rungs)) {
    return preferred;
  }
  for (const NodeId id : tree.level_nodes(k)) {
    if (id != preferred && is_deformable(space, tree.node(id).path, projected, rungs)) return id;
  }
  const NodeId parent = assign_parent(tree, seq, projected, optimizer, iteration, rungs);
  return tree.add_node(parent, projected, cost(space, projected), iteration, seed);
}

NodeId route(MinimaTree& tree, const BundleSequence& seq, const Path& candidate, NodeId preferred,
             const PathOptimizer& optimizer, long iteration, int rungs) {
  if (candidate.level <= 1) return tree.root();
  const Path proj = projection(seq, candidate);
  const Path projected = optimize_seeded_by_path(optimizer, seq.level(proj.level), proj);
  return match_or_create(tree, seq, projected, preferred, path_seed(proj), optimizer, iteration,
                         rungs);
}

}  // namespace

NodeId assign_parent(MinimaTree& tree, const BundleSequence& seq, const Path& candidate,
                     const PathOptimizer& optimizer, long iteration, int rungs) {
  return route(tree, seq, candidate, tree.root(), optimizer, iteration, rungs);
}

std::vector<NodeId> update_tree(MinimaTree& tree, const BundleSequence& seq, int level,
                                const SparseGraph& sparse, NodeId parent,
                                const PathOptimizer& optimizer, const TreeSettings& settings,
                                Rng& rng, long iteration) {
  if (tree.node(parent).level != level - 1) {
    throw Error(ErrorKind::Validation, "parent must sit one level below the updated level",
                "parent");
  }
  const CompositeSpace& space = seq.level(level);

  auto routes = enumerate_shortest_paths(sparse, settings.n, settings.limits);
  auto more = alternative_paths(sparse, settings.max_optimized, settings.alternative_rounds);
  routes.insert(routes.end(), more.begin(), more.end());
  std::sort(routes.begin(), routes.end(), [](const VertexPath& a, const VertexPath& b) {
    return std::tie(a.cost, a.vertices) < std::tie(b.cost, b.vertices);
  });
  routes.erase(std::unique(routes.begin(), routes.end(),
                           [](const VertexPath& a, const VertexPath& b) {
                             return a.vertices == b.vertices;
                           }),
               routes.end());

  std::vector<Path> raw;
  for (const auto& vp : routes) {
    if (raw.size() >= settings.max_optimized) break;
    Path p = to_path(sparse, vp, level);
    const bool seen = std::any_of(raw.begin(), raw.end(), [&](const Path& q) {
      return is_deformable(space, q, p, settings.rungs);
    });
    if (!seen) raw.push_back(std::move(p));
  }

  std::vector<std::uint64_t> seeds(settings.max_optimized);
  for (auto& s : seeds) s = rng.next_seed();

  std::vector<NodeId> added;
  const auto chunk = static_cast<std::size_t>(std::max(kernels::thread_count(), 1));
  for (std::size_t begin = 0; begin < raw.size() && added.size() < settings.n; begin += chunk) {
    const std::size_t end = std::min(raw.size(), begin + chunk);
    const std::span<const Path> batch(raw.data() + begin, end - begin);
    const std::span<const std::uint64_t> batch_seeds(seeds.data() + begin, end - begin);
    const auto optimized = kernels::optimize_all(optimizer, space, batch, batch_seeds);
    for (std::size_t i = 0; i < optimized.size() && added.size() < settings.n; ++i) {
      const Path& p = optimized[i];
      const NodeId target = route(tree, seq, p, parent, optimizer, iteration, settings.rungs);
      if (deformable_to_any(space, tree, tree.node(target).children, p, settings.rungs)) continue;
      added.push_back(tree.add_node(target, p, cost(space, p), iteration, batch_seeds[i]));
    }
  }
  return added;
}

std::vector<TreeViolation> check_tree(const MinimaTree& tree, const BundleSequence& seq,
                                      const PathOptimizer& optimizer, int rungs) {
  std::vector<TreeViolation> out;
  for (const auto& n : tree.nodes()) {
    if (n.id == tree.root()) continue;
    const MinimaNode& p = tree.node(n.parent);
    if (p.level != n.level - 1) {
      out.push_back({n.id, "parent level is not one below"});
      continue;
    }
    if (n.level > 1) {
      try {
        const Path proj = projection(seq, n.path);
        const Path projected = optimize_seeded_by_path(optimizer, seq.level(proj.level), proj);
        if (!is_deformable(seq.level(proj.level), p.path, projected, rungs)) {
          out.push_back({n.id, "optimized projection is not deformable into the parent"});
        }
      } catch (const Error& e) {
        out.push_back({n.id, std::string("projection rejected: ") + e.what()});
      }
    }
  }
  for (const auto& n : tree.nodes()) {
    const auto& kids = n.children;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        const auto& a = tree.node(kids[i]);
        const auto& b = tree.node(kids[j]);
        if (is_deformable(seq.level(a.level), a.path, b.path, rungs)) {
          out.push_back({b.id, "deformable into sibling " + std::to_string(a.id)});
        }
      }
    }
  }
  return out;
}

}  // namespace explorer

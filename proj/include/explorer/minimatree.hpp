#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "explorer/bundle.hpp"
#include "explorer/path.hpp"
#include "explorer/pathopt.hpp"
#include "explorer/rng.hpp"
#include "explorer/roadmap.hpp"
#include "json.hpp"

namespace explorer {

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeStatus { Fresh, Expanded };

const char* to_string(NodeStatus s);

/// A local minimum on level `level`. The root sits on level 0 with an
/// empty path.
struct MinimaNode {
  NodeId id = 0;
  int level = 0;
  Path path;
  double cost = 0.0;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;  // ascending by cost, then id
  NodeStatus status = NodeStatus::Fresh;
  long created_iteration = 0;
  std::uint64_t optimizer_seed = 0;
};

class MinimaTree {
 public:
  MinimaTree();

  NodeId root() const { return 0; }
  const MinimaNode& node(NodeId id) const;
  bool contains(NodeId id) const { return id < nodes_.size(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<MinimaNode>& nodes() const { return nodes_; }
  std::vector<NodeId> level_nodes(int level) const;

  NodeId add_node(NodeId parent, Path path, double cost, long iteration, std::uint64_t seed);
  void mark_expanded(NodeId id);

  nlohmann::json to_json() const;
  static MinimaTree from_json(const nlohmann::json& doc);

 private:
  MinimaNode& mutable_node(NodeId id);

  std::vector<MinimaNode> nodes_;
};

/// Candidate and dedup settings for tree updates.
struct TreeSettings {
  std::size_t n = 5;                // new minima per update, at most
  int alternative_rounds = 20;      // penalized shortest-path searches
  std::size_t max_optimized = 25;   // raw candidates handed to the optimizer
  int rungs = 100;
  EnumerationLimits limits;
};

/// Node on level k whose path is deformable to the optimized projection of
/// `candidate` (level k+1). Creates that node, and its own ancestors, when
/// nothing matches. Level-1 candidates belong to the root. Projections are
/// optimized with optimize_seeded_by_path.
NodeId assign_parent(MinimaTree& tree, const BundleSequence& seq, const Path& candidate,
                     const PathOptimizer& optimizer, long iteration, int rungs = 100);

/// Collects start-goal routes of `sparse` (level k+1), optimizes them and
/// inserts the minima not deformable into a sibling. Minima whose projection
/// does not optimize onto `parent` are routed by assign_parent. Returns new
/// level k+1 node ids. Throws NoPathFound with the tree unchanged.
std::vector<NodeId> update_tree(MinimaTree& tree, const BundleSequence& seq, int level,
                                const SparseGraph& sparse, NodeId parent,
                                const PathOptimizer& optimizer, const TreeSettings& settings,
                                Rng& rng, long iteration);

struct TreeViolation {
  NodeId node = 0;
  std::string what;
};

/// Checks the parent edge rule and pairwise sibling non-deformability.
std::vector<TreeViolation> check_tree(const MinimaTree& tree, const BundleSequence& seq,
                                      const PathOptimizer& optimizer, int rungs = 100);

}  // namespace explorer

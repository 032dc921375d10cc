#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "explorer/bundle.hpp"
#include "explorer/minimatree.hpp"
#include "explorer/pathopt.hpp"
#include "explorer/roadmap.hpp"
#include "json.hpp"

namespace explorer {

/// Session parameters. Radii are fractions of each level's measure.
struct ExplorerParams {
  RoadmapParams roadmap;
  ShortcutSettings optimizer;
  TreeSettings tree;

  nlohmann::json to_json() const;
  /// Missing fields keep their defaults. Throws ValidationError on
  /// non-positive values.
  static ExplorerParams from_json(const nlohmann::json& doc);
};

/// One committed expansion: enough to replay it.
struct ExpansionEvent {
  long iteration = 0;
  NodeId node = 0;
  long samples = 0;
};

struct ExpansionReport {
  long iteration = 0;
  NodeId node = 0;
  int level = 0;  // the grown level
  std::vector<NodeId> new_nodes;
  GrowStats grow;
  FaceReduction reduction;
  bool no_path = false;
  double seconds = 0.0;

  /// Without the wall time.
  nlohmann::json to_json() const;
};

class Session {
 public:
  Session(BundleSequence seq, ExplorerParams params, std::uint64_t seed);

  const BundleSequence& bundle() const { return seq_; }
  const Scene& scene() const { return seq_.scene(); }
  const ExplorerParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  long iteration() const { return iteration_; }
  int levels() const { return seq_.size(); }
  const MinimaTree& tree() const { return tree_; }
  const LevelRoadmap& roadmap(int level) const;
  const std::vector<ExpansionEvent>& events() const { return events_; }
  const PathOptimizer& optimizer() const { return optimizer_; }

  /// Grows the level above `node` biased by its path, reduces the sparse
  /// graph and adds the new minima. Throws NodeUnknown or LevelExhausted.
  ExpansionReport expand(NodeId node, const Ptc& ptc, const std::atomic<bool>* cancel = nullptr,
                         std::atomic<long>* progress = nullptr);

  nlohmann::json snapshot() const { return tree_.to_json(); }

  /// Scene, bundle, params, seed and event log.
  nlohmann::json save() const;
  /// Rebuilds the session by replaying the event log.
  static Session load(const nlohmann::json& doc);

 private:
  BundleSequence seq_;
  ExplorerParams params_;
  std::uint64_t seed_;
  ShortcutOptimizer optimizer_;
  std::vector<LevelRoadmap> roadmaps_;
  MinimaTree tree_;
  long iteration_ = 0;
  std::vector<ExpansionEvent> events_;
};

/// Loads scene and bundle documents. A null bundle gives one level.
Session new_session(const nlohmann::json& scene_doc, const nlohmann::json& bundle_doc,
                    const ExplorerParams& params, std::uint64_t seed);

enum class BatchPolicy { BreadthFirst, BestFirst };

const char* to_string(BatchPolicy p);
BatchPolicy batch_policy_from_string(std::string_view s);

struct BatchResult {
  nlohmann::json snapshot;
  std::vector<ExpansionReport> reports;
};

/// Expands fresh nodes below the top level, in discovery order or by
/// ascending cost, until none remain or `max_nodes` expansions ran.
BatchResult run_batch(Session& session, BatchPolicy policy, const Ptc& per_node,
                      std::size_t max_nodes);

}  // namespace explorer

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "explorer/bundle.hpp"
#include "explorer/cspace.hpp"
#include "explorer/path.hpp"
#include "explorer/rng.hpp"
#include "json.hpp"

namespace explorer {

/// Termination condition for one growth call: a number of drawn samples or
/// a wall-clock budget.
struct Ptc {
  enum class Kind { Samples, Seconds };

  Kind kind = Kind::Samples;
  long samples = 0;
  double seconds = 0.0;

  static Ptc sample_budget(long n) { return {Kind::Samples, n, 0.0}; }
  static Ptc time_budget(double s) { return {Kind::Seconds, 0, s}; }
};

struct Edge {
  std::size_t to = 0;
  double length = 0.0;
};

/// Undirected graph with stable vertex ids. Removed vertices keep their id
/// slot and lose all edges.
class Graph {
 public:
  std::size_t add_vertex(Config x);
  void add_edge(std::size_t a, std::size_t b, double length);
  void remove_vertex(std::size_t v);
  void remove_edge(std::size_t a, std::size_t b);

  bool has_edge(std::size_t a, std::size_t b) const;
  bool alive(std::size_t v) const { return alive_[v] != 0; }
  /// Number of id slots, including removed vertices.
  std::size_t size() const { return configs_.size(); }
  std::size_t vertex_count() const { return live_; }
  std::size_t edge_count() const { return edges_; }
  const Config& vertex(std::size_t v) const { return configs_[v]; }
  std::span<const Config> configs() const { return configs_; }
  std::span<const char> alive_mask() const { return alive_; }
  const std::vector<Edge>& neighbors(std::size_t v) const { return adjacency_[v]; }
  /// Live edges as (a, b) with a < b, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs() const;
  bool connected(std::size_t a, std::size_t b) const;

 private:
  std::vector<Config> configs_;
  std::vector<char> alive_;
  std::vector<std::vector<Edge>> adjacency_;
  std::size_t live_ = 0;
  std::size_t edges_ = 0;
};

/// Every feasible sample, connected to its k nearest visible vertices.
struct DenseGraph {
  Graph graph;
  /// Insertion-ordered edge list for uniform edge sampling.
  std::vector<std::pair<std::size_t, std::size_t>> edge_list;
};

/// Sparse roadmap with visibility radius delta. Start and goal are vertices
/// 0 and 1 from initialization.
struct SparseGraph {
  Graph graph;
  double delta = 0.0;
  std::size_t start = 0;
  std::size_t goal = 1;
  std::vector<std::size_t> component;  // union-find parents

  std::size_t find(std::size_t v) const;
  void unite(std::size_t a, std::size_t b);
  void rebuild_components();
};

enum class SparseInsert { Rejected, Coverage, Connectivity, Interface, InterfaceEdge };

const char* to_string(SparseInsert s);

void add_dense(const CompositeSpace& space, DenseGraph& g, Config x, std::size_t k_near);
SparseInsert add_sparse(const CompositeSpace& space, SparseGraph& s, const Config& x);

/// Radii are fractions of each level's measure.
struct RoadmapParams {
  double delta_fraction = 0.15;
  double rho_fraction = 0.05;
  double epsilon_fraction = 1e-3;
  double p_path = 0.5;
  std::size_t k_near = 10;
};

/// Sampling radii resolved for one base level.
struct SamplerParams {
  double epsilon = 0.0;
  double rho = 0.0;
  double p_path = 0.5;

  static SamplerParams resolve(const RoadmapParams& p, const CompositeSpace& base);
};

/// Biased base sample: along `q` with probability p_path (perturbed within
/// rho), otherwise on a random dense edge; then perturbed within epsilon.
Config sample_base(const CompositeSpace& base, const DenseGraph& g, const Path& q,
                   const SamplerParams& params, Rng& rng);

/// Sample on `level`. Uniform on level 1 or without a selected path;
/// otherwise a biased base sample on level-1 lifted with uniform fibers.
/// The result may be infeasible.
Config component_restriction_sampling(const BundleSequence& seq, int level,
                                      const DenseGraph* base_graph, const Path* selected,
                                      const SamplerParams& params, Rng& rng);

struct LevelRoadmap {
  int level = 0;
  DenseGraph dense;
  SparseGraph sparse;
  long samples_drawn = 0;
};

/// Both graphs seeded with the level's start and goal.
LevelRoadmap init_level(const CompositeSpace& space, int level, const RoadmapParams& params);

struct GrowStats {
  long drawn = 0;
  long feasible = 0;
  long sparse_added = 0;
};

/// Sample, discard infeasible, add to the dense then the sparse graph, until
/// the ptc holds. `base` and `selected` are the roadmap and minimum of the
/// level below, absent on level 1. `cancel` stops early when set;
/// `progress` receives the running count of drawn samples.
GrowStats grow(const BundleSequence& seq, LevelRoadmap& target, const LevelRoadmap* base,
               const Path* selected, const RoadmapParams& params, const Ptc& ptc, Rng& rng,
               const std::atomic<bool>* cancel = nullptr, std::atomic<long>* progress = nullptr);

struct FaceReduction {
  std::size_t vertices = 0;
  std::size_t edges = 0;
};

/// For each triangle (v_S, v_T, v_N) whose sides [v_S, v_T] and
/// [v_S, v_N, v_T] are deformable: drops v_N when its only neighbors are v_S
/// and v_T, otherwise drops the edge (v_S, v_T). Start and goal are never
/// removed and stay connected.
FaceReduction remove_reducible_faces(const CompositeSpace& space, SparseGraph& s, int rungs = 100);

struct VertexPath {
  std::vector<std::size_t> vertices;
  double cost = 0.0;
};

struct EnumerationLimits {
  double bound_factor = 3.0;
  long max_expansions = 10000;
};

/// Up to n loop-free start-goal paths of the sparse graph, ascending by
/// cost, ties broken by vertex sequence. Throws NoPathFound when start and
/// goal are disconnected.
std::vector<VertexPath> enumerate_shortest_paths(const SparseGraph& s, std::size_t n,
                                                 EnumerationLimits limits = {});

/// Distinct start-goal routes by repeated shortest-path search, each round
/// penalizing the edges of the routes already found (weight times
/// 1 + penalty * uses). Returns up to n distinct vertex paths in discovery
/// order with their true costs. Throws NoPathFound when disconnected.
std::vector<VertexPath> alternative_paths(const SparseGraph& s, std::size_t n, int rounds,
                                          double penalty = 1.0);

Path to_path(const SparseGraph& s, const VertexPath& vp, int level);

nlohmann::json roadmap_to_json(const LevelRoadmap& r);

}  // namespace explorer

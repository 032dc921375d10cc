#include "explorer/roadmap.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include "explorer/error.hpp"
#include "explorer/kernels.hpp"
#include "explorer/pathopt.hpp"

namespace explorer {

using nlohmann::json;

std::size_t Graph::add_vertex(Config x) {
  configs_.push_back(std::move(x));
  alive_.push_back(1);
  adjacency_.emplace_back();
  ++live_;
  return configs_.size() - 1;
}

void Graph::add_edge(std::size_t a, std::size_t b, double length) {
  if (a == b || has_edge(a, b)) return;
  adjacency_[a].push_back({b, length});
  adjacency_[b].push_back({a, length});
  ++edges_;
}

void Graph::remove_vertex(std::size_t v) {
  if (!alive(v)) return;
  for (const Edge& e : adjacency_[v]) {
    auto& other = adjacency_[e.to];
    other.erase(std::remove_if(other.begin(), other.end(), [v](const Edge& f) { return f.to == v; }),
                other.end());
    --edges_;
  }
  adjacency_[v].clear();
  alive_[v] = 0;
  --live_;
}

void Graph::remove_edge(std::size_t a, std::size_t b) {
  if (!has_edge(a, b)) return;
  auto drop = [](std::vector<Edge>& adj, std::size_t to) {
    adj.erase(std::remove_if(adj.begin(), adj.end(), [to](const Edge& e) { return e.to == to; }),
              adj.end());
  };
  drop(adjacency_[a], b);
  drop(adjacency_[b], a);
  --edges_;
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
  const auto& adj = adjacency_[a];
  return std::any_of(adj.begin(), adj.end(), [b](const Edge& e) { return e.to == b; });
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edge_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < adjacency_.size(); ++a) {
    for (const Edge& e : adjacency_[a]) {
      if (a < e.to) out.emplace_back(a, e.to);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Graph::connected(std::size_t a, std::size_t b) const {
  if (!alive(a) || !alive(b)) return false;
  if (a == b) return true;
  std::vector<char> seen(configs_.size(), 0);
  std::deque<std::size_t> queue{a};
  seen[a] = 1;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const Edge& e : adjacency_[v]) {
      if (e.to == b) return true;
      if (!seen[e.to]) {
        seen[e.to] = 1;
        queue.push_back(e.to);
      }
    }
  }
  return false;
}

std::size_t SparseGraph::find(std::size_t v) const {
  while (component[v] != v) v = component[v];
  return v;
}

void SparseGraph::unite(std::size_t a, std::size_t b) {
  const std::size_t ra = find(a);
  const std::size_t rb = find(b);
  if (ra != rb) component[std::max(ra, rb)] = std::min(ra, rb);
}

void SparseGraph::rebuild_components() {
  component.resize(graph.size());
  for (std::size_t v = 0; v < component.size(); ++v) component[v] = v;
  for (const auto& [a, b] : graph.edge_pairs()) unite(a, b);
}

const char* to_string(SparseInsert s) {
  switch (s) {
    case SparseInsert::Rejected: return "rejected";
    case SparseInsert::Coverage: return "coverage";
    case SparseInsert::Connectivity: return "connectivity";
    case SparseInsert::Interface: return "interface";
    case SparseInsert::InterfaceEdge: return "interface_edge";
  }
  return "?";
}

void add_dense(const CompositeSpace& space, DenseGraph& g, Config x, std::size_t k_near) {
  const auto near = kernels::nearest(space, g.graph.configs(), x, k_near);
  const std::size_t v = g.graph.add_vertex(std::move(x));
  const Config& q = g.graph.vertex(v);
  for (const std::size_t u : near) {
    if (space.is_segment_feasible(g.graph.vertex(u), q)) {
      g.graph.add_edge(u, v, space.distance(g.graph.vertex(u), q));
      g.edge_list.emplace_back(u, v);
    }
  }
}

namespace {

std::size_t add_sparse_vertex(SparseGraph& s, Config x) {
  const std::size_t v = s.graph.add_vertex(std::move(x));
  s.component.push_back(v);
  return v;
}

void connect(const CompositeSpace& space, SparseGraph& s, std::size_t a, std::size_t b) {
  s.graph.add_edge(a, b, space.distance(s.graph.vertex(a), s.graph.vertex(b)));
  s.unite(a, b);
}

}  // namespace

SparseInsert add_sparse(const CompositeSpace& space, SparseGraph& s, const Config& x) {
  const auto near = kernels::within_radius(space, s.graph.configs(), x, s.delta, s.graph.alive_mask());
  std::vector<std::size_t> visible;
  for (const std::size_t v : near) {
    if (space.is_segment_feasible(s.graph.vertex(v), x)) visible.push_back(v);
  }
  if (visible.empty()) {
    add_sparse_vertex(s, x);
    return SparseInsert::Coverage;
  }
  std::vector<std::size_t> reps;  // nearest visible vertex of each component
  std::vector<std::size_t> roots;
  for (const std::size_t v : visible) {
    const std::size_t r = s.find(v);
    if (std::find(roots.begin(), roots.end(), r) == roots.end()) {
      roots.push_back(r);
      reps.push_back(v);
    }
  }
  if (reps.size() >= 2) {
    const std::size_t v = add_sparse_vertex(s, x);
    for (const std::size_t u : reps) connect(space, s, u, v);
    return SparseInsert::Connectivity;
  }
  if (visible.size() >= 2) {
    const std::size_t a = visible[0];
    const std::size_t b = visible[1];
    if (!s.graph.has_edge(a, b)) {
      if (space.is_segment_feasible(s.graph.vertex(a), s.graph.vertex(b))) {
        connect(space, s, a, b);
        return SparseInsert::InterfaceEdge;
      }
      const std::size_t v = add_sparse_vertex(s, x);
      connect(space, s, a, v);
      connect(space, s, b, v);
      return SparseInsert::Interface;
    }
  }
  return SparseInsert::Rejected;
}

SamplerParams SamplerParams::resolve(const RoadmapParams& p, const CompositeSpace& base) {
  return {p.epsilon_fraction * base.measure(), p.rho_fraction * base.measure(), p.p_path};
}

Config sample_base(const CompositeSpace& base, const DenseGraph& g, const Path& q,
                   const SamplerParams& params, Rng& rng) {
  const bool along_path = g.edge_list.empty() || rng.bernoulli(params.p_path);
  Config x;
  if (along_path) {
    const auto cum = cumulative_lengths(base, q);
    x = point_at(base, q, cum, rng.uniform(0.0, cum.back()));
    if (params.rho > 0.0) x = base.perturb(x, params.rho, rng);
  } else {
    const auto& [a, b] = g.edge_list[rng.index(g.edge_list.size())];
    x = base.interpolate(g.graph.vertex(a), g.graph.vertex(b), rng.uniform());
  }
  if (params.epsilon > 0.0) x = base.perturb(x, params.epsilon, rng);
  return base.clamp(std::move(x));
}

Config component_restriction_sampling(const BundleSequence& seq, int level,
                                      const DenseGraph* base_graph, const Path* selected,
                                      const SamplerParams& params, Rng& rng) {
  if (level == 1 || selected == nullptr || base_graph == nullptr) {
    return seq.level(level).sample_uniform(rng);
  }
  const int k = level - 1;
  const Config base = sample_base(seq.level(k), *base_graph, *selected, params, rng);
  const Config fiber = seq.sample_fiber(k, rng);
  return seq.lift(k, base, fiber);
}

LevelRoadmap init_level(const CompositeSpace& space, int level, const RoadmapParams& params) {
  LevelRoadmap r;
  r.level = level;
  r.sparse.delta = params.delta_fraction * space.measure();
  const Config start = space.start();
  const Config goal = space.goal();
  add_dense(space, r.dense, start, params.k_near);
  add_dense(space, r.dense, goal, params.k_near);
  r.sparse.start = add_sparse_vertex(r.sparse, start);
  r.sparse.goal = add_sparse_vertex(r.sparse, goal);
  if (space.distance(start, goal) <= r.sparse.delta && space.is_segment_feasible(start, goal)) {
    connect(space, r.sparse, r.sparse.start, r.sparse.goal);
  }
  return r;
}

GrowStats grow(const BundleSequence& seq, LevelRoadmap& target, const LevelRoadmap* base,
               const Path* selected, const RoadmapParams& params, const Ptc& ptc, Rng& rng,
               const std::atomic<bool>* cancel, std::atomic<long>* progress) {
  const CompositeSpace& space = seq.level(target.level);
  const SamplerParams sp = target.level > 1 ? SamplerParams::resolve(params, seq.level(target.level - 1))
                                            : SamplerParams{};
  const auto t0 = std::chrono::steady_clock::now();
  GrowStats stats;
  auto done = [&] {
    if (cancel != nullptr && cancel->load()) return true;
    if (ptc.kind == Ptc::Kind::Samples) return stats.drawn >= ptc.samples;
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    return dt.count() >= ptc.seconds;
  };
  while (!done()) {
    Config x = component_restriction_sampling(seq, target.level, base ? &base->dense : nullptr,
                                              selected, sp, rng);
    ++stats.drawn;
    if (progress != nullptr) progress->store(stats.drawn, std::memory_order_relaxed);
    if (!space.is_config_feasible(x)) continue;
    ++stats.feasible;
    add_dense(space, target.dense, x, params.k_near);
    if (add_sparse(space, target.sparse, x) != SparseInsert::Rejected) ++stats.sparse_added;
  }
  target.samples_drawn += stats.drawn;
  return stats;
}

namespace {

std::vector<std::size_t> common_neighbors(const Graph& g, std::size_t a, std::size_t b) {
  std::vector<std::size_t> na;
  std::vector<std::size_t> nb;
  for (const Edge& e : g.neighbors(a)) na.push_back(e.to);
  for (const Edge& e : g.neighbors(b)) nb.push_back(e.to);
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  std::vector<std::size_t> out;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(out));
  return out;
}

}  // namespace

FaceReduction remove_reducible_faces(const CompositeSpace& space, SparseGraph& s, int rungs) {
  FaceReduction out;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : s.graph.edge_pairs()) {
      if (!s.graph.has_edge(a, b)) continue;
      for (const std::size_t n : common_neighbors(s.graph, a, b)) {
        if (!s.graph.alive(n)) continue;
        const Config& qa = s.graph.vertex(a);
        const Config& qb = s.graph.vertex(b);
        const Path direct{0, {qa, qb}};
        const Path via{0, {qa, s.graph.vertex(n), qb}};
        if (!is_deformable(space, direct, via, rungs)) continue;
        // a-b stays in the graph, so neither removal can disconnect anything
        const bool apex_only = n != s.start && n != s.goal && s.graph.neighbors(n).size() == 2;
        if (apex_only) {
          s.graph.remove_vertex(n);
          ++out.vertices;
        } else {
          s.graph.remove_edge(a, b);
          ++out.edges;
        }
        changed = true;
        break;
      }
    }
  }
  if (out.vertices + out.edges > 0) s.rebuild_components();
  return out;
}

std::vector<VertexPath> enumerate_shortest_paths(const SparseGraph& s, std::size_t n,
                                                 EnumerationLimits limits) {
  const Graph& g = s.graph;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // exact cost-to-goal guides the search, so the first path found is shortest
  std::vector<double> h(g.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  h[s.goal] = 0.0;
  open.emplace(0.0, s.goal);
  while (!open.empty()) {
    const auto [d, v] = open.top();
    open.pop();
    if (d > h[v]) continue;
    for (const Edge& e : g.neighbors(v)) {
      if (d + e.length < h[e.to]) {
        h[e.to] = d + e.length;
        open.emplace(h[e.to], e.to);
      }
    }
  }
  if (h[s.start] == kInf) {
    throw Error(ErrorKind::NoPathFound, "start and goal are not connected in the sparse graph");
  }
  if (s.start == s.goal) return {VertexPath{{s.start}, 0.0}};

  const double bound = limits.bound_factor * h[s.start] * (1.0 + 1e-12) + 1e-12;
  std::vector<VertexPath> found;
  std::vector<char> on_path(g.size(), 0);
  std::vector<std::size_t> path{s.start};
  on_path[s.start] = 1;
  long expansions = 0;

  struct Frame {
    std::vector<std::pair<double, std::size_t>> options;  // (len + h, vertex)
    std::size_t next = 0;
    double cost = 0.0;
  };
  auto frame_for = [&](std::size_t v, double cost) {
    Frame f;
    f.cost = cost;
    for (const Edge& e : g.neighbors(v)) {
      if (h[e.to] == kInf) continue;
      f.options.emplace_back(e.length + h[e.to], e.to);
    }
    std::sort(f.options.begin(), f.options.end());
    return f;
  };
  auto edge_length = [&](std::size_t a, std::size_t b) {
    for (const Edge& e : g.neighbors(a)) {
      if (e.to == b) return e.length;
    }
    return kInf;
  };

  std::vector<Frame> stack{frame_for(s.start, 0.0)};
  while (!stack.empty() && expansions < limits.max_expansions) {
    Frame& top = stack.back();
    if (top.next >= top.options.size()) {
      on_path[path.back()] = 0;
      path.pop_back();
      stack.pop_back();
      continue;
    }
    const std::size_t u = top.options[top.next++].second;
    if (on_path[u]) continue;
    const double c = top.cost + edge_length(path.back(), u);
    if (c + h[u] > bound) continue;
    ++expansions;
    if (u == s.goal) {
      VertexPath vp{path, c};
      vp.vertices.push_back(u);
      found.push_back(std::move(vp));
      continue;
    }
    path.push_back(u);
    on_path[u] = 1;
    stack.push_back(frame_for(u, c));
  }
  std::sort(found.begin(), found.end(), [](const VertexPath& a, const VertexPath& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.vertices < b.vertices;
  });
  if (found.size() > n) found.resize(n);
  return found;
}

std::vector<VertexPath> alternative_paths(const SparseGraph& s, std::size_t n, int rounds,
                                          double penalty) {
  const Graph& g = s.graph;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::map<std::pair<std::size_t, std::size_t>, int> uses;
  auto key = [](std::size_t a, std::size_t b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  };
  std::vector<VertexPath> found;
  for (int round = 0; round < rounds && found.size() < n; ++round) {
    std::vector<double> dist(g.size(), kInf);
    std::vector<std::size_t> parent(g.size(), kNone);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[s.start] = 0.0;
    open.emplace(0.0, s.start);
    while (!open.empty()) {
      const auto [d, v] = open.top();
      open.pop();
      if (d > dist[v]) continue;
      for (const Edge& e : g.neighbors(v)) {
        const auto it = uses.find(key(v, e.to));
        const double w = e.length * (1.0 + penalty * (it == uses.end() ? 0 : it->second));
        if (d + w < dist[e.to]) {
          dist[e.to] = d + w;
          parent[e.to] = v;
          open.emplace(dist[e.to], e.to);
        }
      }
    }
    if (dist[s.goal] == kInf) {
      throw Error(ErrorKind::NoPathFound, "start and goal are not connected in the sparse graph");
    }
    VertexPath vp;
    for (std::size_t v = s.goal; v != kNone; v = parent[v]) vp.vertices.push_back(v);
    std::reverse(vp.vertices.begin(), vp.vertices.end());
    for (std::size_t i = 1; i < vp.vertices.size(); ++i) {
      const std::size_t a = vp.vertices[i - 1];
      const std::size_t b = vp.vertices[i];
      ++uses[key(a, b)];
      for (const Edge& e : g.neighbors(a)) {
        if (e.to == b) vp.cost += e.length;
      }
    }
    const bool seen = std::any_of(found.begin(), found.end(), [&](const VertexPath& f) {
      return f.vertices == vp.vertices;
    });
    if (!seen) found.push_back(std::move(vp));
  }
  return found;
}

Path to_path(const SparseGraph& s, const VertexPath& vp, int level) {
  Path p{level, {}};
  for (const std::size_t v : vp.vertices) p.waypoints.push_back(s.graph.vertex(v));
  if (p.size() == 1) p.waypoints.push_back(p.front());
  return p;
}

namespace {

json graph_json(const Graph& g) {
  json vertices = json::array();
  for (std::size_t v = 0; v < g.size(); ++v) {
    vertices.push_back(g.alive(v) ? config_to_json(g.vertex(v)) : json(nullptr));
  }
  json edges = json::array();
  for (const auto& [a, b] : g.edge_pairs()) edges.push_back({a, b});
  return {{"vertices", vertices}, {"edges", edges}};
}

}  // namespace

json roadmap_to_json(const LevelRoadmap& r) {
  json sparse = graph_json(r.sparse.graph);
  sparse["start"] = r.sparse.start;
  sparse["goal"] = r.sparse.goal;
  sparse["delta"] = r.sparse.delta;
  return {{"level", r.level},
          {"samples_drawn", r.samples_drawn},
          {"dense", graph_json(r.dense.graph)},
          {"sparse", sparse}};
}

}  // namespace explorer

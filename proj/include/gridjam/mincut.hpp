#pragma once

// Weighted cut engines on undirected multigraphs:
//   min_st_cut      - Dinic max-flow, source-side residual reachability
//   global_min_cut  - Stoer-Wagner maximum-adjacency phases
//   enumerate_cuts  - every bipartition, for oracles on small graphs
//
// Both polynomial engines work over the ordered group of CutKey values
// (number of infinite edges, finite weight, edge count) compared
// lexicographically. Minimising in that order treats +infinity as absorbing
// and, among equal-weight cuts, prefers the one with fewer edges.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "gridjam/cut.hpp"
#include "gridjam/errors.hpp"

namespace gridjam {

struct CutKey {
  int infinite = 0;
  double finite = 0.0;
  int edges = 0;

  static CutKey of(double weight) {
    return std::isinf(weight) ? CutKey{1, 0.0, 1} : CutKey{0, weight, 1};
  }
  static CutKey unbounded() { return {std::numeric_limits<int>::max() / 4, 0.0, 0}; }

  CutKey& operator+=(const CutKey& o) {
    infinite += o.infinite;
    finite += o.finite;
    edges += o.edges;
    return *this;
  }
  CutKey& operator-=(const CutKey& o) {
    infinite -= o.infinite;
    finite -= o.finite;
    edges -= o.edges;
    if (weights_equal(finite, 0.0)) finite = 0.0;
    return *this;
  }
  friend CutKey operator+(CutKey a, const CutKey& b) { return a += b; }
  friend CutKey operator-(CutKey a, const CutKey& b) { return a -= b; }

  // <0, 0, >0 under lexicographic order with tolerant comparison of `finite`.
  friend int compare(const CutKey& a, const CutKey& b) {
    if (a.infinite != b.infinite) return a.infinite < b.infinite ? -1 : 1;
    if (!weights_equal(a.finite, b.finite)) return a.finite < b.finite ? -1 : 1;
    if (a.edges != b.edges) return a.edges < b.edges ? -1 : 1;
    return 0;
  }
  friend bool operator<(const CutKey& a, const CutKey& b) { return compare(a, b) < 0; }
  bool positive() const { return compare(*this, CutKey{}) > 0; }
};

namespace detail {

inline void require_nodes(const WeightedGraph& g, std::initializer_list<NodeId> nodes) {
  for (NodeId v : nodes) {
    if (v < 0 || v >= g.num_nodes) throw TopologyError("node outside the graph");
  }
}

// Parallel edges merged per unordered node pair; self-loops dropped.
inline std::map<std::pair<NodeId, NodeId>, CutKey> merged_capacities(const WeightedGraph& g) {
  std::map<std::pair<NodeId, NodeId>, CutKey> caps;
  for (const auto& e : g.edges) {
    if (e.weight < 0) throw TopologyError("negative edge weight");
    if (e.a == e.b) continue;
    caps[std::minmax(e.a, e.b)] += CutKey::of(e.weight);
  }
  return caps;
}

class Dinic {
 public:
  explicit Dinic(int n) : adj_(n), level_(n), cursor_(n) {}

  void add_undirected(NodeId u, NodeId v, const CutKey& cap) {
    adj_[u].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({v, cap});
    adj_[v].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({u, cap});
  }

  CutKey run(NodeId s, NodeId t) {
    CutKey flow;
    while (bfs(s, t)) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      while (true) {
        const CutKey pushed = dfs(s, t, CutKey::unbounded());
        if (!pushed.positive()) break;
        flow += pushed;
      }
    }
    return flow;
  }

  // Nodes reachable from s through arcs with positive residual capacity.
  std::vector<char> source_side(NodeId s) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<NodeId> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (int id : adj_[u]) {
        const auto& arc = arcs_[id];
        if (!seen[arc.to] && arc.residual.positive()) {
          seen[arc.to] = 1;
          stack.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    NodeId to;
    CutKey residual;
  };

  bool bfs(NodeId s, NodeId t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<NodeId> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      for (int id : adj_[u]) {
        const auto& arc = arcs_[id];
        if (level_[arc.to] < 0 && arc.residual.positive()) {
          level_[arc.to] = level_[u] + 1;
          q.push(arc.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  CutKey dfs(NodeId u, NodeId t, const CutKey& limit) {
    if (u == t) return limit;
    for (auto& i = cursor_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
      const int id = adj_[u][i];
      Arc& arc = arcs_[id];
      if (level_[arc.to] != level_[u] + 1 || !arc.residual.positive()) continue;
      const CutKey got = dfs(arc.to, t, std::min(limit, arc.residual));
      if (got.positive()) {
        arc.residual -= got;
        arcs_[id ^ 1].residual += got;
        return got;
      }
    }
    return {};
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<int> cursor_;
};

}  // namespace detail

struct StCutResult {
  CutResult cut;
  CutKey flow;  // max-flow value, equal to the cut key by duality
};

// Minimum s-t cut; side_a is the minimal source side (nodes reachable from s
// in the final residual network).
inline StCutResult min_st_cut_with_flow(const WeightedGraph& g, NodeId s, NodeId t) {
  detail::require_nodes(g, {s, t});
  if (s == t) throw TopologyError("s-t cut needs distinct terminals");
  detail::Dinic flow(g.num_nodes);
  for (const auto& [pair, cap] : detail::merged_capacities(g)) {
    flow.add_undirected(pair.first, pair.second, cap);
  }
  StCutResult out;
  out.flow = flow.run(s, t);
  out.cut = make_cut(g, flow.source_side(s));
  return out;
}

inline CutResult min_st_cut(const WeightedGraph& g, NodeId s, NodeId t) {
  return min_st_cut_with_flow(g, s, t).cut;
}

// Stoer-Wagner global minimum cut, O(n^3) with a dense adjacency matrix.
inline CutResult global_min_cut(const WeightedGraph& g) {
  const int n = g.num_nodes;
  if (n < 2) throw TopologyError("global min cut needs at least two nodes");

  std::vector<std::vector<CutKey>> adj(n, std::vector<CutKey>(n));
  for (const auto& [pair, cap] : detail::merged_capacities(g)) {
    adj[pair.first][pair.second] += cap;
    adj[pair.second][pair.first] += cap;
  }

  std::vector<std::vector<NodeId>> groups(n);
  for (NodeId v = 0; v < n; ++v) groups[v] = {v};
  std::vector<char> merged(n, 0);

  bool have_best = false;
  CutKey best;
  std::vector<NodeId> best_side;

  for (int phase = 0; phase < n - 1; ++phase) {
    std::vector<CutKey> attach(n);
    std::vector<char> added(n, 0);
    NodeId prev = -1;
    NodeId last = -1;
    const int active = n - phase;
    for (int step = 0; step < active; ++step) {
      NodeId pick = -1;
      for (NodeId v = 0; v < n; ++v) {
        if (merged[v] || added[v]) continue;
        if (pick < 0 || attach[pick] < attach[v]) pick = v;
      }
      added[pick] = 1;
      prev = last;
      last = pick;
      for (NodeId u = 0; u < n; ++u) {
        if (!merged[u] && !added[u]) attach[u] += adj[pick][u];
      }
    }
    if (!have_best || attach[last] < best) {
      have_best = true;
      best = attach[last];
      best_side = groups[last];
    }
    for (NodeId u = 0; u < n; ++u) {
      if (u == prev || u == last) continue;
      adj[prev][u] += adj[last][u];
      adj[u][prev] = adj[prev][u];
    }
    groups[prev].insert(groups[prev].end(), groups[last].begin(), groups[last].end());
    merged[last] = 1;
  }

  std::vector<char> side(n, 0);
  for (NodeId v : best_side) side[v] = 1;
  return make_cut(g, side);
}

inline constexpr int kDefaultEnumerationCap = 16;

// Calls fn(const CutResult&) once per bipartition (2^(n-1) - 1 of them). The
// last node is always kept out of side_a.
template <typename Fn>
void for_each_cut(const WeightedGraph& g, Fn&& fn, int max_nodes = kDefaultEnumerationCap) {
  const int n = g.num_nodes;
  if (n > max_nodes) {
    throw TooLarge("cut enumeration capped at " + std::to_string(max_nodes) + " nodes, graph has " +
                   std::to_string(n));
  }
  if (n < 2) return;
  const std::uint64_t limit = std::uint64_t{1} << (n - 1);
  std::vector<char> side(n, 0);
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    for (int v = 0; v < n - 1; ++v) side[v] = static_cast<char>((mask >> v) & 1U);
    fn(make_cut(g, side));
  }
}

inline std::vector<CutResult> enumerate_cuts(const WeightedGraph& g, int max_nodes = kDefaultEnumerationCap) {
  std::vector<CutResult> out;
  for_each_cut(g, [&](const CutResult& c) { out.push_back(c); }, max_nodes);
  return out;
}

}  // namespace gridjam

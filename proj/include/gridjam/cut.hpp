#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gridjam {

using NodeId = int;
using MeasurementId = int;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Ties between cut weights are resolved with this tolerance, scaled by magnitude.
inline constexpr double kWeightTolerance = 1e-12;

inline bool weights_equal(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= kWeightTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool weight_less(double a, double b) { return a < b && !weights_equal(a, b); }

struct WeightedEdge {
  MeasurementId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  double weight = 1.0;  // >= 0, may be kInfinity
  bool secure = false;
};

// Undirected multigraph; parallel edges are kept as separate entries.
struct WeightedGraph {
  int num_nodes = 0;
  std::vector<WeightedEdge> edges;
};

// A bipartition of the nodes together with the edges crossing it.
struct CutResult {
  std::vector<NodeId> side_a;          // sorted
  std::vector<MeasurementId> edges;    // sorted ids of crossing edges
  double weight = 0.0;
  int n_secure = 0;
  int n_insecure = 0;

  int size() const { return static_cast<int>(edges.size()); }
  bool contains_node(NodeId v) const { return std::binary_search(side_a.begin(), side_a.end(), v); }
};

// Builds the CutResult of `in_side_a` (indicator per node) on `g`.
inline CutResult make_cut(const WeightedGraph& g, const std::vector<char>& in_side_a) {
  CutResult cut;
  for (NodeId v = 0; v < g.num_nodes; ++v) {
    if (in_side_a[v]) cut.side_a.push_back(v);
  }
  for (const auto& e : g.edges) {
    if (static_cast<bool>(in_side_a[e.a]) == static_cast<bool>(in_side_a[e.b])) continue;
    cut.edges.push_back(e.id);
    cut.weight += e.weight;
    (e.secure ? cut.n_secure : cut.n_insecure) += 1;
  }
  std::sort(cut.edges.begin(), cut.edges.end());
  return cut;
}

// Disjoint-set forest used for the connectivity checks across modules.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --components_;
    return true;
  }

  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  int components_;
};

}  // namespace gridjam

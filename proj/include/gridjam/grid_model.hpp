#pragma once

// DC measurement model: buses, lines, measurements, the augmented
// measurement matrix H and the measurement graph G_H.
//
// Buses are indexed 0..n-1 internally; the reference bus is node n and its
// column is always the last column of H. State vectors carry the trailing
// reference entry (always 0) explicitly.

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gridjam/cut.hpp"
#include "gridjam/errors.hpp"

namespace gridjam {

struct Bus {
  int id = 0;
  bool is_reference = false;
};

struct Line {
  int from = 0;
  int to = 0;
  double susceptance = 1.0;
};

enum class MeasurementKind { LineFlow, PhaseAngle };

struct Measurement {
  MeasurementId id = 0;
  MeasurementKind kind = MeasurementKind::LineFlow;
  int bus_i = 0;
  int bus_j = 0;  // unused for PhaseAngle
  double susceptance = 1.0;
  bool secure = false;

  static Measurement flow(MeasurementId id, int i, int j, double b = 1.0, bool secure = false) {
    return {id, MeasurementKind::LineFlow, i, j, b, secure};
  }
  static Measurement angle(MeasurementId id, int i, bool secure = false) {
    return {id, MeasurementKind::PhaseAngle, i, 0, 1.0, secure};
  }
};

inline constexpr double kDefaultNoiseSigma = 0.01;

struct MeasurementSystem {
  int num_buses = 0;  // n, excluding the reference
  std::vector<Line> lines;
  std::vector<Measurement> measurements;
  // Diagonal of the noise covariance; empty means sigma^2 * I with the default sigma.
  std::vector<double> noise_variance;

  int reference() const { return num_buses; }
  int num_nodes() const { return num_buses + 1; }
  int num_measurements() const { return static_cast<int>(measurements.size()); }

  std::vector<Bus> buses() const {
    std::vector<Bus> out;
    for (int i = 0; i <= num_buses; ++i) out.push_back({i, i == num_buses});
    return out;
  }

  double variance(std::size_t row) const {
    return noise_variance.empty() ? kDefaultNoiseSigma * kDefaultNoiseSigma : noise_variance[row];
  }

  std::optional<std::size_t> row_of(MeasurementId id) const {
    for (std::size_t r = 0; r < measurements.size(); ++r) {
      if (measurements[r].id == id) return r;
    }
    return std::nullopt;
  }

  // Copy without the listed measurements (rows deleted from H, z and Sigma).
  MeasurementSystem without(const std::set<MeasurementId>& removed) const {
    MeasurementSystem out{num_buses, lines, {}, {}};
    for (std::size_t r = 0; r < measurements.size(); ++r) {
      if (removed.count(measurements[r].id)) continue;
      out.measurements.push_back(measurements[r]);
      if (!noise_variance.empty()) out.noise_variance.push_back(noise_variance[r]);
    }
    return out;
  }
};

// Structural checks from the type invariants (observability is checked by the builders).
inline void validate(const MeasurementSystem& sys) {
  const int n = sys.num_buses;
  if (n < 1) throw TopologyError("system needs at least one non-reference bus");
  for (const auto& l : sys.lines) {
    if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n) {
      throw TopologyError("line endpoint out of range");
    }
    if (l.from == l.to) throw TopologyError("line is a self-loop");
    if (!(l.susceptance > 0)) throw TopologyError("line susceptance must be positive");
  }
  std::unordered_set<MeasurementId> ids;
  for (const auto& m : sys.measurements) {
    if (!ids.insert(m.id).second) {
      throw TopologyError("duplicate measurement id " + std::to_string(m.id));
    }
    if (m.bus_i < 0 || m.bus_i >= n) throw TopologyError("measurement bus out of range");
    if (m.kind == MeasurementKind::PhaseAngle) {
      if (m.susceptance != 1.0) throw TopologyError("phase-angle measurement must have unit susceptance");
      continue;
    }
    if (m.bus_j < 0 || m.bus_j >= n || m.bus_i == m.bus_j) {
      throw TopologyError("flow measurement endpoints must be distinct non-reference buses");
    }
    const bool on_line = std::any_of(sys.lines.begin(), sys.lines.end(), [&](const Line& l) {
      return (l.from == m.bus_i && l.to == m.bus_j) || (l.from == m.bus_j && l.to == m.bus_i);
    });
    if (!on_line) throw TopologyError("flow measurement on a pair of buses with no line");
    if (!(m.susceptance > 0)) throw TopologyError("flow susceptance must be positive");
  }
  if (!sys.noise_variance.empty()) {
    if (sys.noise_variance.size() != sys.measurements.size()) {
      throw TopologyError("noise covariance size does not match measurement count");
    }
    for (double v : sys.noise_variance) {
      if (!(v > 0)) throw TopologyError("noise variances must be positive");
    }
  }
}

// Endpoints of the measurement's edge in G_H.
inline std::pair<NodeId, NodeId> endpoints(const MeasurementSystem& sys, const Measurement& m) {
  if (m.kind == MeasurementKind::PhaseAngle) return {m.bus_i, sys.reference()};
  return {m.bus_i, m.bus_j};
}

// Susceptance-weighted incidence matrix without the rank check.
inline Eigen::MatrixXd incidence_matrix(const MeasurementSystem& sys) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(sys.num_measurements(), sys.num_nodes());
  for (int r = 0; r < sys.num_measurements(); ++r) {
    const auto& m = sys.measurements[r];
    const auto [a, b] = endpoints(sys, m);
    h(r, a) = m.susceptance;
    h(r, b) = -m.susceptance;
  }
  return h;
}

inline bool measurements_connected(const MeasurementSystem& sys) {
  UnionFind uf(sys.num_nodes());
  for (const auto& m : sys.measurements) {
    const auto [a, b] = endpoints(sys, m);
    uf.unite(a, b);
  }
  return uf.components() == 1;
}

inline Eigen::MatrixXd build_matrix(const MeasurementSystem& sys) {
  validate(sys);
  Eigen::MatrixXd h = incidence_matrix(sys);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
  lu.setThreshold(1e-10);
  if (lu.rank() < sys.num_buses) {
    throw UnobservableSystem("measurement matrix has rank " + std::to_string(lu.rank()) + " < " +
                             std::to_string(sys.num_buses));
  }
  return h;
}

struct GraphEdge {
  MeasurementId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  bool secure = false;
};

// G_H: one edge per measurement over the buses plus the reference node.
struct MeasurementGraph {
  int num_nodes = 0;
  NodeId reference = 0;
  std::vector<GraphEdge> edges;

  int num_secure() const {
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return e.secure; }));
  }
  int num_insecure() const { return static_cast<int>(edges.size()) - num_secure(); }

  bool connected() const {
    UnionFind uf(num_nodes);
    for (const auto& e : edges) uf.unite(e.a, e.b);
    return uf.components() == 1;
  }

  const GraphEdge* find(MeasurementId id) const {
    for (const auto& e : edges) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  // Same topology with a weight per edge (by position in `edges`).
  WeightedGraph weighted(std::span<const double> weights) const {
    WeightedGraph g{num_nodes, {}};
    g.edges.reserve(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      g.edges.push_back({edges[k].id, edges[k].a, edges[k].b, weights[k], edges[k].secure});
    }
    return g;
  }

  // Weight `secure_weight` on secure edges and `insecure_weight` on the rest.
  WeightedGraph weighted(double secure_weight, double insecure_weight) const {
    std::vector<double> w;
    w.reserve(edges.size());
    for (const auto& e : edges) w.push_back(e.secure ? secure_weight : insecure_weight);
    return weighted(w);
  }
};

inline MeasurementGraph build_graph(const MeasurementSystem& sys) {
  validate(sys);
  MeasurementGraph g{sys.num_nodes(), sys.reference(), {}};
  for (const auto& m : sys.measurements) {
    const auto [a, b] = endpoints(sys, m);
    g.edges.push_back({m.id, a, b, m.secure});
  }
  if (!g.connected()) throw UnobservableSystem("measurement graph is disconnected");
  return g;
}

// Edges with exactly one endpoint in `node_set`. Unit weights unless `weights`
// (one entry per edge, by position) is given.
inline CutResult cut_edges(const MeasurementGraph& graph, const std::vector<NodeId>& node_set,
                           std::span<const double> weights = {}) {
  std::vector<char> in_set(graph.num_nodes, 0);
  for (NodeId v : node_set) {
    if (v < 0 || v >= graph.num_nodes) throw TopologyError("node outside the graph");
    in_set[v] = 1;
  }
  const auto members = std::count(in_set.begin(), in_set.end(), 1);
  if (members == 0 || members == graph.num_nodes) {
    throw TopologyError("cut requires a proper nonempty node subset");
  }
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(graph.edges.size(), 1.0);
    weights = unit;
  }
  return make_cut(graph.weighted(weights), in_set);
}

// Node side of `cut` that excludes the reference: the support of the state shift c.
inline std::vector<NodeId> shifted_side(const MeasurementGraph& graph, const CutResult& cut) {
  if (!cut.contains_node(graph.reference)) return cut.side_a;
  std::vector<NodeId> out;
  for (NodeId v = 0; v < graph.num_nodes; ++v) {
    if (!cut.contains_node(v)) out.push_back(v);
  }
  return out;
}

}  // namespace gridjam

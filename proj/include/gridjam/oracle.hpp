#pragma once

// Brute-force ground truth for small instances: every bipartition of G_H
// crossed with every admissible split of its edges into injected, jammed and
// untouched counts. Costs depend only on counts (all insecure edges share one
// price, all secure edges another), so splits are enumerated by count.

#include <optional>
#include <vector>

#include "gridjam/attack_design.hpp"
#include "gridjam/grid_model.hpp"
#include "gridjam/mincut.hpp"

namespace gridjam {

inline constexpr int kOracleNodeCap = 12;

// Every cut of a graph, enumerated once and reused across cost models.
struct CutCatalog {
  const MeasurementGraph* graph = nullptr;
  std::vector<CutResult> cuts;

  explicit CutCatalog(const MeasurementGraph& g, int max_nodes = kOracleNodeCap) : graph(&g) {
    if (g.num_nodes > max_nodes) {
      throw TooLarge("oracle capped at " + std::to_string(max_nodes) + " nodes");
    }
    cuts = enumerate_cuts(g.weighted(1.0, 1.0), max_nodes);
  }
};

struct ActionCounts {
  int inject = 0;
  int jam_insecure = 0;
  int jam_secure = 0;
};

// Feasibility of a count split on a cut with n_s secure, n_sc insecure edges.
inline bool admissible(AttackType type, int n_s, int n_sc, const ActionCounts& k) {
  const bool uses_jamming = k.jam_insecure > 0 || k.jam_secure > 0;
  const bool jams_secure = k.jam_secure > 0;
  switch (type) {
    case AttackType::HiddenInjection:
    case AttackType::DetectableInjection:
      if (uses_jamming) return false;
      break;
    case AttackType::HiddenJamming:
    case AttackType::DetectableJamming:
      if (jams_secure) return false;
      break;
    default:
      break;
  }
  if (k.inject < 1) return false;
  const int untouched = n_s + n_sc - k.inject - k.jam_insecure - k.jam_secure;
  if (is_hidden(type)) return untouched == 0;
  // Surviving cut edges need a strict majority of injected ones.
  return k.inject > untouched;
}

struct OracleResult {
  double cost = 0.0;
  AttackPlan plan;
};

// Minimum-cost admissible split for a single cut's counts, if any.
inline std::optional<std::pair<double, ActionCounts>> best_split(AttackType type, const CostModel& cost, int n_s,
                                                                 int n_sc) {
  std::optional<std::pair<double, ActionCounts>> best;
  for (int inject = 0; inject <= n_sc; ++inject) {
    for (int jam_ins = 0; inject + jam_ins <= n_sc; ++jam_ins) {
      for (int jam_sec = 0; jam_sec <= n_s; ++jam_sec) {
        const ActionCounts k{inject, jam_ins, jam_sec};
        if (!admissible(type, n_s, n_sc, k)) continue;
        const double c = action_cost(cost, inject, jam_ins, jam_sec);
        if (!best || c < best->first) best = std::make_pair(c, k);
      }
    }
  }
  return best;
}

// Global minimum over all cuts; ties prefer fewer cut edges, then the first
// cut enumerated. Returns nullopt when no cut admits the attack type.
inline std::optional<OracleResult> optimal_cost(const CutCatalog& catalog, const CostModel& cost, AttackType type) {
  validate(cost);
  // Split optimum per distinct (n_s, n_sc) pair.
  std::map<std::pair<int, int>, std::optional<std::pair<double, ActionCounts>>> memo;
  const CutResult* best_cut = nullptr;
  std::pair<double, ActionCounts> best_split_found{};
  for (const auto& cut : catalog.cuts) {
    const auto key = std::make_pair(cut.n_secure, cut.n_insecure);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, best_split(type, cost, cut.n_secure, cut.n_insecure)).first;
    if (!it->second) continue;
    const double c = it->second->first;
    if (!best_cut || weight_less(c, best_split_found.first) ||
        (weights_equal(c, best_split_found.first) && cut.size() < best_cut->size())) {
      best_cut = &cut;
      best_split_found = *it->second;
    }
  }
  if (!best_cut) return std::nullopt;
  const auto& k = best_split_found.second;
  OracleResult out;
  out.cost = best_split_found.first;
  out.plan = make_plan(*catalog.graph, *best_cut, type, cost, k.inject, k.jam_insecure, k.jam_secure, "oracle");
  return out;
}

inline std::optional<OracleResult> optimal_cost(const MeasurementGraph& graph, const CostModel& cost, AttackType type) {
  return optimal_cost(CutCatalog(graph), cost, type);
}

}  // namespace gridjam

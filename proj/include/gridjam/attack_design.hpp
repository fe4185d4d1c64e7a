#pragma once

// Attack constructors on the measurement graph G_H.
//
// Every attack is a cut C of G_H: the state shift c is the indicator of the
// side of C without the reference node, so H*c is nonzero exactly on C.
// Hidden attacks touch every cut edge (inject or jam). Detectable attacks
// leave some cut edges untouched, provided the injected edges outnumber the
// untouched survivors so bad-data removal discards the survivors instead.
//
// Exact designers: hidden_injection, hidden_jamming, hidden_generalized.
// Heuristic designers (constrained cuts): detectable_injection,
// detectable_jamming, detectable_generalized.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridjam/cut.hpp"
#include "gridjam/errors.hpp"
#include "gridjam/grid_model.hpp"
#include "gridjam/mincut.hpp"

namespace gridjam {

struct CostModel {
  double p_inject = 1.0;
  double p_jam_secure = 1.0;
  double p_jam_insecure = 1.0;
};

inline void validate(const CostModel& c) {
  if (!(c.p_inject > 0 && c.p_jam_secure > 0 && c.p_jam_insecure > 0)) {
    throw InvalidCosts("costs must be positive");
  }
  if (!(c.p_jam_insecure <= c.p_jam_secure && c.p_jam_secure <= c.p_inject)) {
    throw InvalidCosts("costs must satisfy p_jam_insecure <= p_jam_secure <= p_inject");
  }
}

enum class CostInterval { I, II, III };

inline std::string_view to_string(CostInterval i) {
  switch (i) {
    case CostInterval::I: return "I";
    case CostInterval::II: return "II";
    case CostInterval::III: return "III";
  }
  return "?";
}

inline CostInterval classify_interval(const CostModel& c) {
  validate(c);
  const double half = c.p_inject / 2;
  if (c.p_jam_insecure >= half && c.p_jam_secure >= half) return CostInterval::I;
  if (c.p_jam_secure + c.p_jam_insecure >= c.p_inject) return CostInterval::II;
  return CostInterval::III;
}

enum class AttackType {
  HiddenInjection,
  DetectableInjection,
  HiddenJamming,
  DetectableJamming,
  HiddenGeneralized,
  DetectableGeneralized,
};

inline constexpr AttackType kAllAttackTypes[] = {
    AttackType::HiddenInjection,   AttackType::DetectableInjection,   AttackType::HiddenJamming,
    AttackType::DetectableJamming, AttackType::HiddenGeneralized,     AttackType::DetectableGeneralized,
};

inline bool is_hidden(AttackType t) {
  return t == AttackType::HiddenInjection || t == AttackType::HiddenJamming ||
         t == AttackType::HiddenGeneralized;
}

inline std::string_view to_string(AttackType t) {
  switch (t) {
    case AttackType::HiddenInjection: return "hidden-injection";
    case AttackType::DetectableInjection: return "detectable-injection";
    case AttackType::HiddenJamming: return "hidden-jamming";
    case AttackType::DetectableJamming: return "detectable-jamming";
    case AttackType::HiddenGeneralized: return "hidden-generalized";
    case AttackType::DetectableGeneralized: return "detectable-generalized";
  }
  return "?";
}

inline std::optional<AttackType> parse_attack_type(std::string_view s) {
  for (AttackType t : kAllAttackTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

struct AttackPlan {
  AttackType type = AttackType::HiddenInjection;
  CutResult cut;
  std::vector<MeasurementId> injected;         // insecure only
  std::vector<MeasurementId> jammed_insecure;
  std::vector<MeasurementId> jammed_secure;
  std::vector<int> state_shift;                // 0-1 per node, reference entry 0
  double total_cost = 0.0;
  std::string subproblem;                      // which construction produced the plan

  int untouched() const {
    return cut.size() - static_cast<int>(injected.size() + jammed_insecure.size() + jammed_secure.size());
  }
};

inline double action_cost(const CostModel& c, std::size_t injected, std::size_t jammed_insecure,
                          std::size_t jammed_secure) {
  return c.p_inject * static_cast<double>(injected) + c.p_jam_insecure * static_cast<double>(jammed_insecure) +
         c.p_jam_secure * static_cast<double>(jammed_secure);
}

enum class DesignStatus { Feasible, Infeasible, NoSolutionFound };

inline std::string_view to_string(DesignStatus s) {
  switch (s) {
    case DesignStatus::Feasible: return "feasible";
    case DesignStatus::Infeasible: return "infeasible";
    case DesignStatus::NoSolutionFound: return "no-solution-found";
  }
  return "?";
}

struct DesignResult {
  DesignStatus status = DesignStatus::Infeasible;
  std::optional<AttackPlan> plan;

  bool feasible() const { return status == DesignStatus::Feasible; }
  static DesignResult infeasible() { return {DesignStatus::Infeasible, std::nullopt}; }
  static DesignResult no_solution() { return {DesignStatus::NoSolutionFound, std::nullopt}; }
  static DesignResult of(AttackPlan p) { return {DesignStatus::Feasible, std::move(p)}; }
};

// Assigns actions to the edges of `cut`, lowest measurement ids first.
inline AttackPlan make_plan(const MeasurementGraph& graph, const CutResult& cut, AttackType type,
                            const CostModel& cost, int n_inject, int n_jam_insecure, int n_jam_secure,
                            std::string subproblem = {}) {
  AttackPlan plan;
  plan.type = type;
  plan.cut = cut;
  plan.subproblem = std::move(subproblem);
  std::vector<MeasurementId> secure;
  std::vector<MeasurementId> insecure;
  for (MeasurementId id : cut.edges) {
    const GraphEdge* e = graph.find(id);
    (e->secure ? secure : insecure).push_back(id);
  }
  if (n_inject + n_jam_insecure > static_cast<int>(insecure.size()) || n_jam_secure > static_cast<int>(secure.size()) ||
      n_inject < 0 || n_jam_insecure < 0 || n_jam_secure < 0) {
    throw Error("plan action counts exceed the cut's edges");
  }
  plan.injected.assign(insecure.begin(), insecure.begin() + n_inject);
  plan.jammed_insecure.assign(insecure.begin() + n_inject, insecure.begin() + n_inject + n_jam_insecure);
  plan.jammed_secure.assign(secure.begin(), secure.begin() + n_jam_secure);
  plan.state_shift.assign(graph.num_nodes, 0);
  for (NodeId v : shifted_side(graph, cut)) plan.state_shift[v] = 1;
  plan.total_cost = action_cost(cost, plan.injected.size(), plan.jammed_insecure.size(), plan.jammed_secure.size());
  return plan;
}

// ---------------------------------------------------------------------------
// Algorithm 1 core: lightest cut that contains at least one insecure edge.

// Sweeps min s-t cuts over the endpoints of every insecure edge and keeps the
// lightest (fewer edges on ties, then the earliest edge). Each such cut
// contains its insecure edge, and every cut containing some insecure edge
// (s,t) weighs at least the min s-t cut for that pair, so the result is exact.
inline std::optional<CutResult> lightest_insecure_cut(const MeasurementGraph& graph, const WeightedGraph& weighted) {
  std::optional<CutResult> best;
  for (const auto& e : graph.edges) {
    if (e.secure) continue;
    CutResult c = min_st_cut(weighted, e.a, e.b);
    if (!best || weight_less(c.weight, best->weight) ||
        (weights_equal(c.weight, best->weight) && c.size() < best->size())) {
      best = std::move(c);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Algorithm 2: iterative min-cut with edge boosting for constrained cuts.

enum class CutConstraint {
  SecureMinority,  // Case A: 2 n_S < |C|
  SecureMajority,  // Case B: 2 n_S >= |C| and n_Sc >= 1
};

inline bool satisfies(const CutResult& c, CutConstraint k) {
  if (k == CutConstraint::SecureMinority) return 2 * c.n_secure < c.size();
  return c.n_insecure >= 1 && 2 * c.n_secure >= c.size();
}

enum class BoostMode {
  Infinite,  // boosted edge leaves every later cut
  Doubling,  // weight grows by its current value
};

struct ConstrainedCutOptions {
  BoostMode beta = BoostMode::Infinite;
  double gamma = kInfinity;  // stop once the min cut weighs at least this much
  int max_boosts = -1;       // < 0: number of edges
};

// Returns a cut satisfying `constraint`, weighted under the original
// `weights`, or nullopt when the search stops without one (not a proof of
// infeasibility).
inline std::optional<CutResult> constrained_min_cut(const MeasurementGraph& graph, std::span<const double> weights,
                                                    CutConstraint constraint, const ConstrainedCutOptions& opts = {}) {
  if (weights.size() != graph.edges.size()) throw Error("one weight per edge required");
  if (!(opts.gamma > 0)) throw Error("gamma must be positive");
  std::vector<double> current(weights.begin(), weights.end());
  const int cap = opts.max_boosts < 0 ? static_cast<int>(graph.edges.size()) : opts.max_boosts;

  for (int boosts = 0;; ++boosts) {
    const CutResult cut = global_min_cut(graph.weighted(current));
    if (satisfies(cut, constraint)) {
      std::vector<char> side(graph.num_nodes, 0);
      for (NodeId v : cut.side_a) side[v] = 1;
      return make_cut(graph.weighted(weights), side);
    }
    if (!(cut.weight < opts.gamma) || boosts >= cap) return std::nullopt;

    // Violating class: secure edges for Case A; for Case B insecure edges,
    // or secure ones (to infinity) when the cut has no insecure edge.
    const bool boost_secure = constraint == CutConstraint::SecureMinority || cut.n_insecure == 0;
    const bool force_infinite = constraint == CutConstraint::SecureMajority && cut.n_insecure == 0;
    int pick = -1;
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
      const auto& e = graph.edges[k];
      if (e.secure != boost_secure || !std::binary_search(cut.edges.begin(), cut.edges.end(), e.id)) continue;
      if (pick < 0 || weight_less(current[k], current[pick]) ||
          (weights_equal(current[k], current[pick]) && e.id > graph.edges[pick].id)) {
        pick = static_cast<int>(k);
      }
    }
    if (pick < 0 || std::isinf(current[pick])) return std::nullopt;
    if (force_infinite || opts.beta == BoostMode::Infinite || current[pick] == 0.0) {
      current[pick] = kInfinity;
    } else {
      current[pick] *= 2;
    }
  }
}

inline std::optional<CutResult> constrained_min_cut(const MeasurementGraph& graph, double secure_weight,
                                                    double insecure_weight, CutConstraint constraint,
                                                    const ConstrainedCutOptions& opts = {}) {
  std::vector<double> w;
  for (const auto& e : graph.edges) w.push_back(e.secure ? secure_weight : insecure_weight);
  return constrained_min_cut(graph, w, constraint, opts);
}

struct DesignOptions {
  ConstrainedCutOptions constrained;
};

// ---------------------------------------------------------------------------
// Injection and jamming attacks on insecure measurements only.

namespace detail {

// Minimum cardinality cut without secure edges.
inline std::optional<CutResult> secure_free_cut(const MeasurementGraph& graph) {
  const auto cut = lightest_insecure_cut(graph, graph.weighted(kInfinity, 1.0));
  if (!cut || std::isinf(cut->weight)) return std::nullopt;
  return cut;
}

inline int floor_half(int v) { return v / 2; }

}  // namespace detail

// Min-cardinality secure-free cut; inject every cut edge.
inline DesignResult hidden_injection(const MeasurementGraph& graph, const CostModel& cost) {
  validate(cost);
  const auto cut = detail::secure_free_cut(graph);
  if (!cut) return DesignResult::infeasible();
  return DesignResult::of(make_plan(graph, *cut, AttackType::HiddenInjection, cost, cut->size(), 0, 0,
                                    "secure-free min-cardinality cut"));
}

// Same cut as hidden_injection; inject one edge and jam the others.
inline DesignResult hidden_jamming(const MeasurementGraph& graph, const CostModel& cost) {
  validate(cost);
  const auto cut = detail::secure_free_cut(graph);
  if (!cut) return DesignResult::infeasible();
  return DesignResult::of(make_plan(graph, *cut, AttackType::HiddenJamming, cost, 1, cut->size() - 1, 0,
                                    "secure-free min-cardinality cut"));
}

// Min-cardinality cut with a secure minority; inject floor(1 + |C|/2) insecure edges.
inline DesignResult detectable_injection(const MeasurementGraph& graph, const CostModel& cost,
                                         const DesignOptions& opts = {}) {
  validate(cost);
  if (graph.num_insecure() == 0) return DesignResult::infeasible();
  const auto cut = constrained_min_cut(graph, 1.0, 1.0, CutConstraint::SecureMinority, opts.constrained);
  if (!cut) return DesignResult::no_solution();
  return DesignResult::of(make_plan(graph, *cut, AttackType::DetectableInjection, cost,
                                    1 + detail::floor_half(cut->size()), 0, 0, "secure-minority cut, unit weights"));
}

namespace detail {

// Case-A plan when jamming an insecure edge is cheaper than half an injection:
// inject n_S + 1, jam the remaining insecure edges.
inline std::optional<AttackPlan> cheap_jamming_case_a(const MeasurementGraph& graph, const CostModel& cost,
                                                      AttackType type, const DesignOptions& opts,
                                                      const std::string& label) {
  const auto cut = constrained_min_cut(graph, cost.p_inject - cost.p_jam_insecure, cost.p_jam_insecure,
                                       CutConstraint::SecureMinority, opts.constrained);
  if (!cut) return std::nullopt;
  const int inject = cut->n_secure + 1;
  return make_plan(graph, *cut, type, cost, inject, cut->n_insecure - inject, 0, label);
}

// Case-A plan when jamming costs at least half an injection: inject
// floor((1+|C|)/2), jam (1 - |C| mod 2) insecure edges.
inline std::optional<AttackPlan> dear_jamming_case_a(const MeasurementGraph& graph, const CostModel& cost,
                                                     AttackType type, const DesignOptions& opts,
                                                     const std::string& label) {
  const auto cut = constrained_min_cut(graph, 1.0, 1.0, CutConstraint::SecureMinority, opts.constrained);
  if (!cut) return std::nullopt;
  const int size = cut->size();
  return make_plan(graph, *cut, type, cost, (1 + size) / 2, 1 - size % 2, 0, label);
}

// Case-B plan (intervals I and II): inject every insecure edge and jam
// n_S + 1 - n_Sc secure edges so the injected edges become a majority.
inline std::optional<AttackPlan> secure_majority_case_b(const MeasurementGraph& graph, const CostModel& cost,
                                                        const DesignOptions& opts, const std::string& label) {
  const auto cut = constrained_min_cut(graph, cost.p_jam_secure, cost.p_inject - cost.p_jam_secure,
                                       CutConstraint::SecureMajority, opts.constrained);
  if (!cut) return std::nullopt;
  return make_plan(graph, *cut, AttackType::DetectableGeneralized, cost, cut->n_insecure, 0,
                   cut->n_secure + 1 - cut->n_insecure, label);
}

}  // namespace detail

inline DesignResult detectable_jamming(const MeasurementGraph& graph, const CostModel& cost,
                                       const DesignOptions& opts = {}) {
  validate(cost);
  if (graph.num_insecure() == 0) return DesignResult::infeasible();
  const bool cheap = cost.p_jam_insecure < cost.p_inject / 2;
  auto plan = cheap ? detail::cheap_jamming_case_a(graph, cost, AttackType::DetectableJamming, opts,
                                                   "secure-minority cut, jamming below half injection")
                    : detail::dear_jamming_case_a(graph, cost, AttackType::DetectableJamming, opts,
                                                  "secure-minority cut, unit weights");
  if (!plan) return DesignResult::no_solution();
  return DesignResult::of(std::move(*plan));
}

// ---------------------------------------------------------------------------
// Generalized attacks: jamming of secure measurements allowed.

// Algorithm 1. Weights p_jam_secure / p_jam_insecure; lightest cut holding an
// insecure edge; inject one insecure edge and jam everything else.
inline DesignResult hidden_generalized(const MeasurementGraph& graph, const CostModel& cost) {
  validate(cost);
  const auto cut = lightest_insecure_cut(graph, graph.weighted(cost.p_jam_secure, cost.p_jam_insecure));
  if (!cut) return DesignResult::infeasible();
  return DesignResult::of(make_plan(graph, *cut, AttackType::HiddenGeneralized, cost, 1, cut->n_insecure - 1,
                                    cut->n_secure, "lightest cut with an insecure edge"));
}

// Dispatches on the cost interval and returns the cheapest plan among the
// interval's sub-problems. The hidden generalized plan is always a valid
// detectable plan, so it is kept as a candidate in every interval; in
// interval III it is the whole answer.
inline DesignResult detectable_generalized(const MeasurementGraph& graph, const CostModel& cost,
                                           const DesignOptions& opts = {}) {
  const CostInterval interval = classify_interval(cost);
  if (graph.num_insecure() == 0) return DesignResult::infeasible();

  std::vector<AttackPlan> candidates;
  auto consider = [&](std::optional<AttackPlan> p) {
    if (p) candidates.push_back(std::move(*p));
  };
  if (interval == CostInterval::I) {
    consider(detail::dear_jamming_case_a(graph, cost, AttackType::DetectableGeneralized, opts, "I-A"));
    consider(detail::secure_majority_case_b(graph, cost, opts, "I-B"));
  } else if (interval == CostInterval::II) {
    consider(detail::cheap_jamming_case_a(graph, cost, AttackType::DetectableGeneralized, opts, "II-A"));
    consider(detail::secure_majority_case_b(graph, cost, opts, "II-B"));
  }
  if (auto hg = hidden_generalized(graph, cost); hg.feasible()) {
    hg.plan->type = AttackType::DetectableGeneralized;
    hg.plan->subproblem = interval == CostInterval::III ? "III" : "III (fallback)";
    candidates.push_back(std::move(*hg.plan));
  }
  if (candidates.empty()) return DesignResult::no_solution();
  auto best = std::min_element(candidates.begin(), candidates.end(), [](const AttackPlan& a, const AttackPlan& b) {
    return weight_less(a.total_cost, b.total_cost);
  });
  return DesignResult::of(std::move(*best));
}

inline DesignResult design(AttackType type, const MeasurementGraph& graph, const CostModel& cost,
                           const DesignOptions& opts = {}) {
  switch (type) {
    case AttackType::HiddenInjection: return hidden_injection(graph, cost);
    case AttackType::DetectableInjection: return detectable_injection(graph, cost, opts);
    case AttackType::HiddenJamming: return hidden_jamming(graph, cost);
    case AttackType::DetectableJamming: return detectable_jamming(graph, cost, opts);
    case AttackType::HiddenGeneralized: return hidden_generalized(graph, cost);
    case AttackType::DetectableGeneralized: return detectable_generalized(graph, cost, opts);
  }
  return DesignResult::infeasible();
}

}  // namespace gridjam

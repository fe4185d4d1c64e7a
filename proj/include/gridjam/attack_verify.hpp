#pragma once

// Runs an AttackPlan against the estimator and decides whether it behaves as
// its declared type: hidden attacks must shift the estimate without moving
// the residual; detectable attacks must shift the estimate with at least one
// injected measurement surviving bad-data removal.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <unordered_set>

#include "gridjam/attack_design.hpp"
#include "gridjam/estimator.hpp"
#include "gridjam/grid_model.hpp"

namespace gridjam {

struct ExecuteOptions {
  double alpha = 10 * kDefaultNoiseSigma;  // injection magnitude on the shifted side
  double change_tolerance = 1e-6;          // per-bus threshold for estimate_changed
  double residual_tolerance = 1e-9;        // relative, hidden-attack residual invariance
};

struct VerificationVerdict {
  AttackType declared = AttackType::HiddenInjection;
  bool estimate_changed = false;
  bool stealthy = false;
  bool survived_injection = false;
  bool observability_ok = true;
  bool final_test_passed = false;
  bool residual_unchanged = false;
  bool matches_declared_type = false;
  double clean_residual = 0.0;
  double attacked_residual = 0.0;
  double shift_error = 0.0;  // max |final - (truth + alpha c)| over buses
  std::vector<MeasurementId> removed;
  std::optional<EstimationReport> report;
};

inline void check_plan(const MeasurementSystem& sys, const AttackPlan& plan) {
  auto require = [&](const std::vector<MeasurementId>& ids, std::optional<bool> secure) {
    for (MeasurementId id : ids) {
      const auto row = sys.row_of(id);
      if (!row) throw PlanMismatch("plan references unknown measurement " + std::to_string(id));
      if (secure && sys.measurements[*row].secure != *secure) {
        throw PlanMismatch("measurement " + std::to_string(id) + " has the wrong security class for its action");
      }
    }
  };
  require(plan.injected, false);
  require(plan.jammed_insecure, false);
  require(plan.jammed_secure, true);
  require(plan.cut.edges, std::nullopt);
  if (static_cast<int>(plan.state_shift.size()) != sys.num_nodes() && !plan.state_shift.empty()) {
    throw PlanMismatch("state shift length does not match the system");
  }
}

inline VerificationVerdict execute(const MeasurementSystem& sys, const Eigen::VectorXd& truth, const AttackPlan& plan,
                                   const DetectorConfig& cfg = {}, const ExecuteOptions& opts = {},
                                   const Eigen::VectorXd* noise = nullptr) {
  validate(sys);
  check_plan(sys, plan);
  if (truth.size() != sys.num_nodes() || truth[sys.reference()] != 0.0) {
    throw Error("truth must have n+1 entries with reference entry 0");
  }
  const int n = sys.num_buses;
  const Eigen::MatrixXd h = incidence_matrix(sys);

  Eigen::VectorXd shift = Eigen::VectorXd::Zero(sys.num_nodes());
  for (std::size_t v = 0; v < plan.state_shift.size(); ++v) shift[v] = opts.alpha * plan.state_shift[v];
  shift[sys.reference()] = 0.0;

  Eigen::VectorXd z = h * truth;
  if (noise) z += *noise;
  const Eigen::VectorXd z_clean = z;
  const Eigen::VectorXd a = h * shift;
  for (MeasurementId id : plan.injected) {
    const auto row = *sys.row_of(id);
    z[row] += a[row];
  }

  std::set<MeasurementId> jammed(plan.jammed_insecure.begin(), plan.jammed_insecure.end());
  jammed.insert(plan.jammed_secure.begin(), plan.jammed_secure.end());
  const MeasurementSystem reduced = sys.without(jammed);
  Eigen::VectorXd z_reduced(reduced.num_measurements());
  Eigen::VectorXd z_clean_reduced(reduced.num_measurements());
  for (int r = 0, k = 0; r < sys.num_measurements(); ++r) {
    if (jammed.count(sys.measurements[r].id)) continue;
    z_reduced[k] = z[r];
    z_clean_reduced[k] = z_clean[r];
    ++k;
  }

  VerificationVerdict v;
  v.declared = plan.type;
  if (!measurements_connected(reduced)) {
    v.observability_ok = false;
    return v;
  }

  v.clean_residual = residual_norm(reduced, z_clean_reduced, wls_estimate(reduced, z_clean_reduced));

  EstimationReport report;
  try {
    report = detect_and_remove(reduced, z_reduced, cfg);
    v.final_test_passed = true;
  } catch (const RemovalFailed& failed) {
    report = failed.report();
    v.observability_ok = report.observable_after_removal;
  }
  v.attacked_residual = report.residual_norm;
  v.stealthy = !report.detected;
  v.removed = report.removed;
  v.residual_unchanged =
      std::abs(v.attacked_residual - v.clean_residual) <= opts.residual_tolerance * std::max(1.0, v.clean_residual);

  const Eigen::VectorXd delta = report.final_estimate - truth;
  v.estimate_changed = delta.head(n).cwiseAbs().maxCoeff() > opts.change_tolerance;
  v.shift_error = (report.final_estimate - truth - shift).head(n).cwiseAbs().maxCoeff();
  const std::unordered_set<MeasurementId> removed(report.removed.begin(), report.removed.end());
  v.survived_injection = std::any_of(plan.injected.begin(), plan.injected.end(),
                                     [&](MeasurementId id) { return !removed.count(id); });
  v.report = std::move(report);

  if (is_hidden(plan.type)) {
    v.matches_declared_type = v.observability_ok && v.stealthy && v.estimate_changed && v.residual_unchanged;
  } else {
    // Detection fires exactly when untouched cut edges survive jamming.
    const bool expect_detection = plan.untouched() > 0;
    v.matches_declared_type = v.observability_ok && v.estimate_changed && v.survived_injection &&
                              v.final_test_passed && v.stealthy != expect_detection;
  }
  return v;
}

// Practical verification for larger systems: greedy removal first; when a
// detectable plan fails under greedy, the failure is a greedy escape and the
// plan is re-checked with exhaustive minimal removal if that search stays
// within `exhaustive_budget` subset evaluations.
struct PracticalVerdict {
  bool verified = false;
  bool greedy_escape = false;
  VerificationVerdict verdict;
};

inline double subset_count(int m, int k_max) {
  double total = 0.0;
  double term = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    term = term * (m - k + 1) / k;
    total += term;
  }
  return total;
}

inline PracticalVerdict verify_practical(const MeasurementSystem& sys, const Eigen::VectorXd& truth,
                                         const AttackPlan& plan, const ExecuteOptions& opts = {},
                                         double exhaustive_budget = 2e4) {
  PracticalVerdict out;
  DetectorConfig greedy;
  greedy.removal_mode = RemovalMode::GreedyNormalizedResidual;
  out.verdict = execute(sys, truth, plan, greedy, opts);
  out.verified = out.verdict.matches_declared_type;
  if (out.verified || is_hidden(plan.type)) return out;

  out.greedy_escape = true;
  const int depth = std::max(1, plan.untouched());
  const int m = sys.num_measurements() - static_cast<int>(plan.jammed_insecure.size() + plan.jammed_secure.size());
  if (subset_count(m, depth) <= exhaustive_budget) {
    DetectorConfig exhaustive;
    exhaustive.removal_mode = RemovalMode::ExhaustiveMinimal;
    exhaustive.max_removals = depth;
    out.verdict = execute(sys, truth, plan, exhaustive, opts);
    out.verified = out.verdict.matches_declared_type;
  }
  return out;
}

}  // namespace gridjam

#pragma once

// DC weighted-least-squares state estimation with the residual threshold
// test ||Sigma^-1/2 (z - H x*)||_2 <= lambda and bad-data removal.
//
// The reference column of H is dropped before solving so the reference angle
// stays pinned at 0. Least squares uses column-pivoted QR on the whitened
// matrix rather than the normal equations.

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gridjam/errors.hpp"
#include "gridjam/grid_model.hpp"

namespace gridjam {

enum class RemovalMode { GreedyNormalizedResidual, ExhaustiveMinimal };

inline constexpr double kNoiselessLambda = 1e-6;

struct DetectorConfig {
  double lambda = kNoiselessLambda;
  RemovalMode removal_mode = RemovalMode::ExhaustiveMinimal;
  int max_removals = -1;  // < 0: m - n - 1, the largest count that can keep rank n

  // sqrt of the chi-square quantile: threshold on the residual 2-norm for
  // noisy runs with `dof` = m - n degrees of freedom.
  static double chi_square_threshold(int dof, double confidence = 0.975) {
    if (dof < 1) return 0.0;
    return std::sqrt(boost::math::quantile(boost::math::chi_squared(dof), confidence));
  }
};

struct EstimationReport {
  Eigen::VectorXd estimate;        // length n+1, reference entry 0
  double residual_norm = 0.0;
  bool detected = false;
  std::vector<MeasurementId> removed;
  Eigen::VectorXd final_estimate;
  double final_residual_norm = 0.0;
  bool observable_after_removal = true;
};

class RemovalFailed : public Error {
 public:
  RemovalFailed(const std::string& what, EstimationReport partial) : Error(what), report_(std::move(partial)) {}
  const EstimationReport& report() const noexcept { return report_; }

 private:
  EstimationReport report_;
};

namespace detail {

struct WlsFit {
  Eigen::VectorXd state;     // n+1 entries
  Eigen::VectorXd weighted_residual;
  double residual_norm = 0.0;
};

// Estimation over a subset of rows of the full system.
class RowSolver {
 public:
  RowSolver(const MeasurementSystem& sys, const Eigen::VectorXd& z) : sys_(sys), z_(z) {
    if (z.size() != sys.num_measurements()) throw Error("measurement vector length does not match the system");
    h_ = incidence_matrix(sys);
    inv_sigma_.resize(sys.num_measurements());
    for (int r = 0; r < sys.num_measurements(); ++r) inv_sigma_[r] = 1.0 / std::sqrt(sys.variance(r));
  }

  int rows() const { return sys_.num_measurements(); }

  bool connected(const std::vector<char>& keep) const {
    UnionFind uf(sys_.num_nodes());
    for (int r = 0; r < rows(); ++r) {
      if (!keep[r]) continue;
      const auto [a, b] = endpoints(sys_, sys_.measurements[r]);
      uf.unite(a, b);
    }
    return uf.components() == 1;
  }

  Eigen::MatrixXd whitened(const std::vector<int>& idx) const {
    const int n = sys_.num_buses;
    Eigen::MatrixXd a(idx.size(), n);
    for (std::size_t k = 0; k < idx.size(); ++k) a.row(k) = h_.row(idx[k]).head(n) * inv_sigma_[idx[k]];
    return a;
  }

  WlsFit fit(const std::vector<char>& keep) const {
    const std::vector<int> idx = indices(keep);
    const int n = sys_.num_buses;
    const Eigen::MatrixXd a = whitened(idx);
    Eigen::VectorXd b(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) b[k] = z_[idx[k]] * inv_sigma_[idx[k]];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < n) throw UnobservableSystem("reduced measurement matrix lost rank");
    WlsFit out;
    out.state = Eigen::VectorXd::Zero(n + 1);
    out.state.head(n) = qr.solve(b);
    out.weighted_residual = b - a * out.state.head(n);
    out.residual_norm = out.weighted_residual.norm();
    return out;
  }

  // Diagonal of the whitened hat matrix for the kept rows.
  Eigen::VectorXd leverage(const std::vector<char>& keep) const {
    const std::vector<int> idx = indices(keep);
    const Eigen::MatrixXd a = whitened(idx);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    return q.rowwise().squaredNorm();
  }

  static std::vector<int> indices(const std::vector<char>& keep) {
    std::vector<int> idx;
    for (int r = 0; r < static_cast<int>(keep.size()); ++r) {
      if (keep[r]) idx.push_back(r);
    }
    return idx;
  }

  MeasurementId id(int row) const { return sys_.measurements[row].id; }

 private:
  const MeasurementSystem& sys_;
  const Eigen::VectorXd& z_;
  Eigen::MatrixXd h_;
  std::vector<double> inv_sigma_;
};

// Calls fn(combination) for each k-subset of [0, m) in lexicographic order
// until fn returns true.
template <typename Fn>
bool for_each_combination(int m, int k, Fn&& fn) {
  if (k > m) return false;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    if (fn(pick)) return true;
    int i = k - 1;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) return false;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace detail

inline Eigen::VectorXd wls_estimate(const MeasurementSystem& sys, const Eigen::VectorXd& z) {
  validate(sys);
  detail::RowSolver solver(sys, z);
  const std::vector<char> keep(sys.num_measurements(), 1);
  if (!solver.connected(keep)) throw UnobservableSystem("measurement graph is disconnected");
  return solver.fit(keep).state;
}

inline double residual_norm(const MeasurementSystem& sys, const Eigen::VectorXd& z, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = z - incidence_matrix(sys) * x;
  double sum = 0.0;
  for (int k = 0; k < r.size(); ++k) sum += r[k] * r[k] / sys.variance(k);
  return std::sqrt(sum);
}

inline EstimationReport detect_and_remove(const MeasurementSystem& sys, const Eigen::VectorXd& z,
                                          const DetectorConfig& cfg = {}) {
  validate(sys);
  if (cfg.lambda < 0) throw Error("lambda must be nonnegative");
  detail::RowSolver solver(sys, z);
  const int m = sys.num_measurements();
  std::vector<char> keep(m, 1);
  if (!solver.connected(keep)) throw UnobservableSystem("measurement graph is disconnected");

  const detail::WlsFit first = solver.fit(keep);
  EstimationReport report;
  report.estimate = first.state;
  report.residual_norm = first.residual_norm;
  report.detected = first.residual_norm > cfg.lambda;
  report.final_estimate = first.state;
  report.final_residual_norm = first.residual_norm;
  if (!report.detected) return report;

  const int max_removals = cfg.max_removals < 0 ? m - sys.num_buses - 1 : std::min(cfg.max_removals, m - sys.num_buses - 1);

  auto finish = [&](const std::vector<char>& kept, const detail::WlsFit& fit) {
    for (int r = 0; r < m; ++r) {
      if (!kept[r]) report.removed.push_back(solver.id(r));
    }
    std::sort(report.removed.begin(), report.removed.end());
    report.final_estimate = fit.state;
    report.final_residual_norm = fit.residual_norm;
  };

  if (cfg.removal_mode == RemovalMode::ExhaustiveMinimal) {
    for (int k = 1; k <= max_removals; ++k) {
      std::vector<char> trial(m, 1);
      const bool found = detail::for_each_combination(m, k, [&](const std::vector<int>& drop) {
        std::fill(trial.begin(), trial.end(), 1);
        for (int r : drop) trial[r] = 0;
        if (!solver.connected(trial)) return false;
        const auto fit = solver.fit(trial);
        if (fit.residual_norm > cfg.lambda) return false;
        finish(trial, fit);
        return true;
      });
      if (found) return report;
    }
    report.observable_after_removal = false;
    throw RemovalFailed("no observability-preserving removal set of size <= " + std::to_string(max_removals) +
                            " passes the residual test",
                        report);
  }

  // Largest normalized residual first, re-estimating after each removal.
  detail::WlsFit fit = first;
  for (int removed = 0; removed < max_removals; ++removed) {
    const Eigen::VectorXd lev = solver.leverage(keep);
    const std::vector<int> idx = detail::RowSolver::indices(keep);
    int pick = -1;
    double best = -1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double spread = 1.0 - lev[k];
      if (spread <= 1e-10) continue;  // critical measurement: residual always 0
      keep[idx[k]] = 0;
      const bool ok = solver.connected(keep);
      keep[idx[k]] = 1;
      if (!ok) continue;
      const double normalized = std::abs(fit.weighted_residual[k]) / std::sqrt(spread);
      if (normalized > best) {
        best = normalized;
        pick = idx[k];
      }
    }
    if (pick < 0) break;
    keep[pick] = 0;
    fit = solver.fit(keep);
    if (fit.residual_norm <= cfg.lambda) {
      finish(keep, fit);
      return report;
    }
  }
  finish(keep, fit);
  report.observable_after_removal = solver.connected(keep);
  throw RemovalFailed("greedy removal did not pass the residual test within " + std::to_string(max_removals) +
                          " removals",
                      report);
}

}  // namespace gridjam

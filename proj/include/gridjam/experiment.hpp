#pragma once

// Randomized sweeps over the secure-measurement fraction: per trial, place
// measurements, design each attack type, verify it, and emit one CSV row.
// Rows come out ordered by (fraction, trial, cost triple, type) whatever the
// worker count.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "gridjam/attack_design.hpp"
#include "gridjam/attack_verify.hpp"
#include "gridjam/casefile.hpp"

namespace gridjam {

// Which trials enter the per-fraction averages.
enum class Condition {
  None,
  HiddenInjectionExists,     // only where hidden injection is feasible
  DetectableJammingExists,   // only where detectable jamming found a plan
};

inline std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "none") return Condition::None;
  if (s == "hidden-injection") return Condition::HiddenInjectionExists;
  if (s == "detectable-jamming") return Condition::DetectableJammingExists;
  return std::nullopt;
}

inline std::optional<AttackType> condition_type(Condition c) {
  switch (c) {
    case Condition::HiddenInjectionExists: return AttackType::HiddenInjection;
    case Condition::DetectableJammingExists: return AttackType::DetectableJamming;
    case Condition::None: break;
  }
  return std::nullopt;
}

struct SweepConfig {
  CaseFile case_file;
  std::vector<AttackType> types;
  std::vector<CostModel> costs;
  std::vector<double> fractions;
  int trials = 100;
  std::uint64_t seed = 1;
  double angle_fraction = 0.6;
  Condition condition = Condition::None;
  DesignOptions design;
  ExecuteOptions execute;
  bool verify = true;
  int jobs = 1;
};

struct SweepRow {
  double fraction = 0.0;
  int trial = 0;
  int cost_index = 0;
  AttackType type = AttackType::HiddenInjection;
  CostInterval interval = CostInterval::I;
  bool feasible = false;
  double cost = 0.0;
  bool verified = false;
  bool greedy_escape = false;
};

struct SummaryRow {
  double fraction = 0.0;
  int cost_index = 0;
  AttackType type = AttackType::HiddenInjection;
  CostInterval interval = CostInterval::I;
  int count = 0;          // trials averaged
  double mean_cost = 0.0;
};

// Seed of a trial; independent of the fraction so that, within a trial, the
// angle buses stay fixed and secure sets are nested as the fraction grows.
inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline Eigen::VectorXd random_truth(int num_buses, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> angle(-0.3, 0.3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(num_buses + 1);
  for (int i = 0; i < num_buses; ++i) x[i] = angle(rng);
  return x;
}

// Types actually designed: the requested ones plus the conditioning type.
inline std::vector<AttackType> sweep_types(const SweepConfig& cfg) {
  std::vector<AttackType> out = cfg.types;
  if (auto ct = condition_type(cfg.condition); ct && std::find(out.begin(), out.end(), *ct) == out.end()) {
    out.push_back(*ct);
  }
  return out;
}

inline std::vector<SweepRow> run_trial(const SweepConfig& cfg, double fraction, int trial) {
  const std::uint64_t s = trial_seed(cfg.seed, trial);
  const MeasurementSystem sys = place_measurements(cfg.case_file, cfg.angle_fraction, fraction, s);
  const MeasurementGraph graph = build_graph(sys);
  const Eigen::VectorXd truth = random_truth(sys.num_buses, s);
  std::vector<SweepRow> rows;
  for (std::size_t ci = 0; ci < cfg.costs.size(); ++ci) {
    const CostModel& cost = cfg.costs[ci];
    for (AttackType type : sweep_types(cfg)) {
      SweepRow row;
      row.fraction = fraction;
      row.trial = trial;
      row.cost_index = static_cast<int>(ci);
      row.type = type;
      row.interval = classify_interval(cost);
      const DesignResult r = design(type, graph, cost, cfg.design);
      row.feasible = r.feasible();
      if (r.feasible()) {
        row.cost = r.plan->total_cost;
        if (cfg.verify) {
          const PracticalVerdict pv = verify_practical(sys, truth, *r.plan, cfg.execute);
          row.verified = pv.verified;
          row.greedy_escape = pv.greedy_escape;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw Error("trials must be at least 1");
  if (cfg.costs.empty()) throw Error("at least one cost triple is required");
  for (const auto& c : cfg.costs) validate(c);

  const std::size_t tasks = cfg.fractions.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<SweepRow>> results(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t fi = t / cfg.trials;
      results[t] = run_trial(cfg, cfg.fractions[fi], static_cast<int>(t % cfg.trials));
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<SweepRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

// Per-(fraction, cost triple, type) mean cost over feasible trials that meet
// the condition.
inline std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows, Condition condition) {
  const auto gate = condition_type(condition);
  std::map<std::tuple<double, int, int>, bool> admitted;  // (fraction, trial, cost) -> condition holds
  if (gate) {
    for (const auto& r : rows) {
      if (r.type == *gate) admitted[{r.fraction, r.trial, r.cost_index}] = r.feasible;
    }
  }
  std::map<std::tuple<double, int, int>, SummaryRow> acc;  // (fraction, cost, type)
  for (const auto& r : rows) {
    auto& s = acc[{r.fraction, r.cost_index, static_cast<int>(r.type)}];
    s.fraction = r.fraction;
    s.cost_index = r.cost_index;
    s.type = r.type;
    s.interval = r.interval;
    if (!r.feasible) continue;
    if (gate) {
      const auto it = admitted.find({r.fraction, r.trial, r.cost_index});
      if (it == admitted.end() || !it->second) continue;
    }
    s.count += 1;
    s.mean_cost += r.cost;
  }
  std::vector<SummaryRow> out;
  for (auto& [key, s] : acc) {
    if (s.count > 0) s.mean_cost /= s.count;
    out.push_back(s);
  }
  return out;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "fraction,trial,type,interval,feasible,cost,verified,greedy_escape\n";
  for (const auto& r : rows) {
    out << format_number(r.fraction) << ',' << r.trial << ',' << to_string(r.type) << ',' << to_string(r.interval)
        << ',' << (r.feasible ? 1 : 0) << ',' << (r.feasible ? format_number(r.cost) : std::string()) << ','
        << (r.verified ? 1 : 0) << ',' << (r.greedy_escape ? 1 : 0) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "fraction,type,interval,count,mean_cost\n";
  for (const auto& s : rows) {
    out << format_number(s.fraction) << ',' << to_string(s.type) << ',' << to_string(s.interval) << ',' << s.count
        << ',' << (s.count > 0 ? format_number(s.mean_cost) : std::string()) << '\n';
  }
}

// "a:b:step" (inclusive, tolerant of rounding) or a comma-separated list.
inline std::vector<double> parse_fractions(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || !(step > 0) || hi < lo) {
      throw Error("fraction range must be 'start:stop:step'");
    }
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) out.push_back(std::round((lo + k * step) * 1e9) / 1e9);
    return out;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (end != item.c_str() + item.size()) throw Error("bad fraction '" + item + "'");
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace gridjam

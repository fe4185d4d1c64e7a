// gridjam: design and verify jamming-aided data attacks on DC state estimation.
//
//   gridjam attack --case ieee14 --type hidden-generalized --pi 1 --pjs .5 --pjsc .25 --seed 7
//   gridjam sweep  --case ieee14 --types hidden-injection,hidden-generalized --fractions 0:0.5:0.1
//
// Exit codes: 0 verified plan, 1 plan failed verification, 2 infeasible,
// 3 no solution found, 64 usage error, 65 case/data error, 74 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gridjam/gridjam.hpp"

namespace {

constexpr int kExitVerified = 0;
constexpr int kExitUnverified = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoSolution = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitIo = 74;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

gridjam::CostModel parse_costs(const std::string& triple) {
  gridjam::CostModel c;
  char tail = 0;
  if (std::sscanf(triple.c_str(), "%lf,%lf,%lf%c", &c.p_inject, &c.p_jam_secure, &c.p_jam_insecure, &tail) != 3) {
    throw UsageError("cost triple must be 'p_inject,p_jam_secure,p_jam_insecure', got '" + triple + "'");
  }
  return c;
}

gridjam::BoostMode parse_beta(const std::string& s) {
  if (s == "inf") return gridjam::BoostMode::Infinite;
  if (s == "double") return gridjam::BoostMode::Doubling;
  throw UsageError("--beta must be 'inf' or 'double'");
}

nlohmann::json plan_json(const gridjam::AttackPlan& p, const gridjam::CostModel& cost) {
  return {
      {"type", gridjam::to_string(p.type)},
      {"interval", gridjam::to_string(gridjam::classify_interval(cost))},
      {"subproblem", p.subproblem},
      {"cut_edges", p.cut.edges},
      {"cut_secure", p.cut.n_secure},
      {"cut_insecure", p.cut.n_insecure},
      {"shifted_buses", [&] {
         std::vector<int> buses;
         for (std::size_t v = 0; v + 1 < p.state_shift.size(); ++v) {
           if (p.state_shift[v]) buses.push_back(static_cast<int>(v) + 1);
         }
         return buses;
       }()},
      {"injected", p.injected},
      {"jammed_insecure", p.jammed_insecure},
      {"jammed_secure", p.jammed_secure},
      {"untouched", p.untouched()},
      {"total_cost", p.total_cost},
  };
}

std::string join(const std::vector<int>& ids) {
  std::ostringstream out;
  for (std::size_t k = 0; k < ids.size(); ++k) out << (k ? " " : "") << ids[k];
  return ids.empty() ? "-" : out.str();
}

struct AttackArgs {
  std::string case_name;
  std::string type = "hidden-generalized";
  double pi = 1.0, pjs = 0.5, pjsc = 0.25;
  std::uint64_t seed = 1;
  double angle_fraction = 0.6;
  double secure_fraction = 0.0;
  double alpha = 10 * gridjam::kDefaultNoiseSigma;
  std::string removal = "auto";
  std::string beta = "inf";
};

int run_attack(const AttackArgs& a) {
  const auto type = gridjam::parse_attack_type(a.type);
  if (!type) throw UsageError("unknown attack type '" + a.type + "'");
  const gridjam::CostModel cost{a.pi, a.pjs, a.pjsc};
  gridjam::validate(cost);

  const gridjam::CaseFile cf = gridjam::load_case(a.case_name);
  const gridjam::MeasurementSystem sys = cf.measurements
                                             ? gridjam::to_system(cf)
                                             : gridjam::place_measurements(cf, a.angle_fraction, a.secure_fraction, a.seed);
  const gridjam::MeasurementGraph graph = gridjam::build_graph(sys);

  gridjam::DesignOptions opts;
  opts.constrained.beta = parse_beta(a.beta);
  const gridjam::DesignResult result = gridjam::design(*type, graph, cost, opts);

  std::cout << "case        " << (cf.name.empty() ? a.case_name : cf.name) << " (" << sys.num_buses << " buses, "
            << sys.num_measurements() << " measurements, " << graph.num_secure() << " secure)\n"
            << "attack      " << gridjam::to_string(*type) << "\n"
            << "costs       p_I=" << cost.p_inject << " p_J^S=" << cost.p_jam_secure << " p_J^Sc=" << cost.p_jam_insecure
            << " (interval " << gridjam::to_string(gridjam::classify_interval(cost)) << ")\n";

  nlohmann::json doc{{"case", cf.name}, {"attack", gridjam::to_string(*type)}, {"status", gridjam::to_string(result.status)}};
  if (!result.feasible()) {
    std::cout << "status      " << gridjam::to_string(result.status) << "\n" << doc.dump() << "\n";
    return result.status == gridjam::DesignStatus::Infeasible ? kExitInfeasible : kExitNoSolution;
  }

  const gridjam::AttackPlan& plan = *result.plan;
  const Eigen::VectorXd truth = gridjam::random_truth(sys.num_buses, a.seed);
  gridjam::ExecuteOptions exec;
  exec.alpha = a.alpha;

  bool verified = false;
  bool greedy_escape = false;
  gridjam::VerificationVerdict verdict;
  if (a.removal == "auto") {
    if (sys.num_measurements() <= 20) {
      verdict = gridjam::execute(sys, truth, plan, {}, exec);
      verified = verdict.matches_declared_type;
    } else {
      const auto pv = gridjam::verify_practical(sys, truth, plan, exec);
      verdict = pv.verdict;
      verified = pv.verified;
      greedy_escape = pv.greedy_escape;
    }
  } else if (a.removal == "exhaustive" || a.removal == "greedy") {
    gridjam::DetectorConfig cfg;
    cfg.removal_mode = a.removal == "greedy" ? gridjam::RemovalMode::GreedyNormalizedResidual
                                             : gridjam::RemovalMode::ExhaustiveMinimal;
    verdict = gridjam::execute(sys, truth, plan, cfg, exec);
    verified = verdict.matches_declared_type;
  } else {
    throw UsageError("--removal must be auto, exhaustive or greedy");
  }

  std::cout << "status      feasible (" << plan.subproblem << ")\n"
            << "cut         " << join(plan.cut.edges) << "  [" << plan.cut.n_secure << " secure, " << plan.cut.n_insecure
            << " insecure]\n"
            << "inject      " << join(plan.injected) << "\n"
            << "jam         insecure: " << join(plan.jammed_insecure) << "  secure: " << join(plan.jammed_secure) << "\n"
            << "untouched   " << plan.untouched() << "\n"
            << "total cost  " << plan.total_cost << "\n"
            << "verdict     " << (verified ? "verified" : "NOT verified") << (greedy_escape ? " (greedy escape)" : "")
            << "; detected=" << !verdict.stealthy << " removed=" << join(verdict.removed)
            << " estimate_changed=" << verdict.estimate_changed << "\n";

  doc["plan"] = plan_json(plan, cost);
  doc["verdict"] = {{"verified", verified},
                    {"greedy_escape", greedy_escape},
                    {"detected", !verdict.stealthy},
                    {"removed", verdict.removed},
                    {"estimate_changed", verdict.estimate_changed},
                    {"survived_injection", verdict.survived_injection},
                    {"observability_ok", verdict.observability_ok}};
  std::cout << doc.dump() << "\n";
  return verified ? kExitVerified : kExitUnverified;
}

struct SweepArgs {
  std::string case_name;
  std::string types = "hidden-injection,detectable-injection,hidden-generalized";
  std::vector<std::string> costs;
  std::string fractions = "0:0.5:0.05";
  int trials = 100;
  std::uint64_t seed = 1;
  double angle_fraction = 0.6;
  std::string condition = "none";
  std::string out;
  std::string summary;
  std::string beta = "inf";
  int jobs = 1;
  bool no_verify = false;
};

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::ios_base::failure("write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

int run_sweep(const SweepArgs& a) {
  gridjam::SweepConfig cfg;
  cfg.case_file = gridjam::load_case(a.case_name);
  std::stringstream types(a.types);
  for (std::string item; std::getline(types, item, ',');) {
    const auto t = gridjam::parse_attack_type(item);
    if (!t) throw UsageError("unknown attack type '" + item + "'");
    cfg.types.push_back(*t);
  }
  for (const auto& c : a.costs) cfg.costs.push_back(parse_costs(c));
  if (cfg.costs.empty()) cfg.costs.push_back({1.0, 0.5, 0.25});
  for (const auto& c : cfg.costs) gridjam::validate(c);
  try {
    cfg.fractions = gridjam::parse_fractions(a.fractions);
  } catch (const gridjam::Error& e) {
    throw UsageError(e.what());
  }
  for (double f : cfg.fractions) {
    if (!(f >= 0 && f <= 1)) throw UsageError("fractions must lie in [0, 1]");
  }
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  const auto cond = gridjam::parse_condition(a.condition);
  if (!cond) throw UsageError("--condition must be none, hidden-injection or detectable-jamming");
  cfg.condition = *cond;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.angle_fraction = a.angle_fraction;
  cfg.design.constrained.beta = parse_beta(a.beta);
  cfg.verify = !a.no_verify;
  cfg.jobs = a.jobs;

  const auto rows = gridjam::run_sweep(cfg);
  std::ostringstream csv;
  gridjam::write_csv(csv, rows);
  std::ostringstream summary;
  gridjam::write_summary_csv(summary, gridjam::summarize(rows, cfg.condition));

  if (a.out.empty() || a.out == "-") {
    std::cout << csv.str();
  } else {
    write_atomically(a.out, csv.str());
  }
  if (!a.summary.empty()) {
    write_atomically(a.summary, summary.str());
  } else {
    std::cerr << summary.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design and verify jamming-aided data attacks on DC state estimation"};
  app.require_subcommand(1);
  const char* env_case = std::getenv("GRIDJAM_CASE");

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "Design one attack on a case and verify it");
  auto* attack_case = attack_cmd->add_option("--case", attack.case_name, "Case file path or bundled name (ieee14, ieee57)");
  if (env_case) attack.case_name = env_case; else attack_case->required();
  attack_cmd->add_option("--type", attack.type, "Attack type")
      ->check(CLI::IsMember({"hidden-injection", "detectable-injection", "hidden-jamming", "detectable-jamming",
                             "hidden-generalized", "detectable-generalized"}));
  attack_cmd->add_option("--pi", attack.pi, "Cost of injecting data into a measurement");
  attack_cmd->add_option("--pjs", attack.pjs, "Cost of jamming a secure measurement");
  attack_cmd->add_option("--pjsc", attack.pjsc, "Cost of jamming an insecure measurement");
  attack_cmd->add_option("--seed", attack.seed, "Seed for measurement placement and the true state");
  attack_cmd->add_option("--angle-fraction", attack.angle_fraction, "Fraction of buses with angle measurements")
      ->check(CLI::Range(0.0, 1.0));
  attack_cmd->add_option("--secure-fraction", attack.secure_fraction, "Fraction of measurements that are secure")
      ->check(CLI::Range(0.0, 1.0));
  attack_cmd->add_option("--alpha", attack.alpha, "State shift magnitude on the attacked side");
  attack_cmd->add_option("--removal", attack.removal, "Bad-data removal: auto, exhaustive or greedy");
  attack_cmd->add_option("--beta", attack.beta, "Boost mode for constrained cuts: inf or double");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Randomized sweep over the secure fraction, CSV output");
  auto* sweep_case = sweep_cmd->add_option("--case", sweep.case_name, "Case file path or bundled name");
  if (env_case) sweep.case_name = env_case; else sweep_case->required();
  sweep_cmd->add_option("--types", sweep.types, "Comma-separated attack types");
  sweep_cmd->add_option("--costs", sweep.costs, "Cost triple p_I,p_J^S,p_J^Sc (repeatable)");
  sweep_cmd->add_option("--fractions", sweep.fractions, "start:stop:step or comma list of secure fractions");
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per fraction");
  sweep_cmd->add_option("--seed", sweep.seed, "Base seed");
  sweep_cmd->add_option("--angle-fraction", sweep.angle_fraction, "Fraction of buses with angle measurements")
      ->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--condition", sweep.condition, "Averaging condition: none, hidden-injection, detectable-jamming");
  sweep_cmd->add_option("--out", sweep.out, "CSV output path (default stdout)");
  sweep_cmd->add_option("--summary", sweep.summary, "Per-fraction averages CSV path (default stderr)");
  sweep_cmd->add_option("--beta", sweep.beta, "Boost mode for constrained cuts: inf or double");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads");
  sweep_cmd->add_flag("--no-verify", sweep.no_verify, "Skip estimator verification");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }

  try {
    if (*attack_cmd) return run_attack(attack);
    return run_sweep(sweep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gridjam::InvalidCosts& e) {
    std::cerr << "invalid costs: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gridjam::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const gridjam::TopologyError& e) {
    std::cerr << "topology error: " << e.what() << "\n";
    return kExitData;
  } catch (const gridjam::UnobservableSystem& e) {
    std::cerr << "unobservable system: " << e.what() << "\n";
    return kExitData;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const gridjam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

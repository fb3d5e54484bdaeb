// sidealloc: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 bad input (config, scenario,
// tensor or allocation file), 3 check found violations, 4 solver refused
// (infeasible or over budget).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"

#include "sidealloc/assignment.hpp"
#include "sidealloc/baselines.hpp"
#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"
#include "sidealloc/harness.hpp"
#include "sidealloc/hierarchical.hpp"
#include "sidealloc/metrics.hpp"

namespace {

using namespace sidealloc;

enum ExitCode : int { kOk = 0, kUsage = 1, kBadInput = 2, kViolation = 3, kRefused = 4 };

struct ExperimentFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algos;
  std::optional<std::string> out;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Override master seed");
  cmd->add_option("--algos", f.algos, "Comma-separated: exhaustive,proposed,greedy,random");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--trials", f.trials, "Override trial count");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

ExperimentConfig resolve_config(const ExperimentFlags& f) {
  auto cfg = load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.algos) cfg.algorithms = parse_algorithm_list(*f.algos);
  if (f.out) cfg.out_dir = *f.out;
  if (f.trials) cfg.trials = *f.trials;
  if (f.threads) cfg.threads = *f.threads;
  validate_config(cfg);
  return cfg;
}

void print_summaries(const ExperimentConfig& cfg, const std::vector<TrialOutcome>& trials) {
  std::cout << summary_csv(cfg, trials);
}

int cmd_run(const ExperimentFlags& f) {
  const auto cfg = resolve_config(f);
  const auto result = run_experiment(cfg);
  print_summaries(cfg, result.trials);
  fmt::print(stderr, "wrote {}/trials.csv, summary.csv, manifest.json\n", cfg.out_dir);
  return kOk;
}

int cmd_sweep(const ExperimentFlags& f) {
  const auto cfg = resolve_config(f);
  const auto result = sweep(cfg);
  std::cout << sweep_csv(result);
  fmt::print(stderr, "wrote {}/sweep.csv, sweep_trials.csv, manifest.json\n", cfg.out_dir);
  return kOk;
}

struct SolveFlags {
  std::string scenario;
  std::string costs;
  std::string algo = "proposed";
  std::uint64_t seed = 1;
  std::optional<std::string> out;
  std::uint64_t budget = kDefaultSearchNodeBudget;
};

Scenario load_valid_scenario(const std::string& path) {
  auto s = load_scenario(path);
  if (const auto report = validate_scenario(s); !report.ok()) {
    throw std::invalid_argument(fmt::format("{}: {}", path, report.message));
  }
  return s;
}

int cmd_solve(const SolveFlags& f) {
  const auto s = load_valid_scenario(f.scenario);
  const auto c = load_cost_tensor(f.costs, s);
  Allocation a;
  switch (parse_algorithm(f.algo)) {
    case Algorithm::kExhaustive: a = exhaustive_global(s, c, f.budget).allocation; break;
    case Algorithm::kProposed: {
      auto r = allocate(s, c);
      for (const auto& sf : r.shortfalls) fmt::print(stderr, "warning: {}\n", sf.message);
      a = std::move(r.allocation);
      break;
    }
    case Algorithm::kGreedy: a = greedy(s, c); break;
    case Algorithm::kRandom: a = random_alloc(s, c, f.seed); break;
  }
  if (f.out) {
    save_allocation(*f.out, a);
  } else {
    std::cout << allocation_to_json(a);
  }
  const auto m = summarize(a, c);
  fmt::print(stderr,
             "{}: objective {:.6f}, highest {:.6f}, mean {:.6f}, worst {:.6f}, stddev {:.6f}, "
             "unassigned {}\n",
             f.algo, total_rate(a, c), m.highest, m.mean, m.worst, m.stddev, m.unassigned);
  return kOk;
}

struct CheckFlags {
  std::string scenario;
  std::optional<std::string> allocation;
  std::optional<std::string> costs;
};

int cmd_check(const CheckFlags& f) {
  const auto s = load_scenario(f.scenario);
  if (const auto report = validate_scenario(s); !report.ok()) {
    fmt::print("scenario: INVALID ({})\n", report.message);
    return kViolation;
  }
  fmt::print("scenario: ok (N = {}, J = {}, L = {}, K = {})\n", s.vehicle_count(),
             s.cluster_count(), s.grid().subframes, s.grid().subchannels);

  if (f.costs) {
    load_cost_tensor(*f.costs, s);
    fmt::print("costs: ok\n");
  }
  if (!f.allocation) return kOk;

  const auto a = load_allocation(*f.allocation);
  const auto conflicts = find_conflicts(a, s);
  if (!conflicts.empty()) {
    for (const auto& c : conflicts) {
      fmt::print("conflict: cluster {} subframe {} vehicles {}\n", c.cluster, c.subframe,
                 c.vehicles);
    }
    fmt::print("allocation: INVALID ({} conflicts)\n", conflicts.size());
    return kViolation;
  }
  fmt::print("allocation: ok ({} assigned, {} unassigned)\n", a.assigned_count(),
             a.vehicle_count() - a.assigned_count());
  return kOk;
}

struct GenerateFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t trial = 0;
  std::string out = ".";
};

int cmd_generate(const GenerateFlags& f) {
  auto cfg = load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  const auto instance = generate_scenario(cfg, f.trial);
  std::filesystem::create_directories(f.out);
  const std::filesystem::path dir(f.out);
  save_scenario((dir / "scenario.json").string(), instance.scenario);
  save_cost_tensor((dir / "costs.txt").string(), instance.costs);
  fmt::print(stderr, "wrote {}/scenario.json and costs.txt (N = {})\n", f.out,
             instance.scenario.vehicle_count());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical subchannel allocation for clustered V2V sidelink broadcast"};
  app.set_version_flag("--version", std::string(sidealloc::kVersion));
  app.require_subcommand(1);

  ExperimentFlags run_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
  add_experiment_flags(run, run_flags);
  auto* sweep_cmd = app.add_subcommand("sweep", "Worst-rate curve over sweep.cluster_sizes");
  add_experiment_flags(sweep_cmd, sweep_flags);

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Allocate one scenario + cost tensor");
  solve->add_option("--scenario", solve_flags.scenario, "Scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--costs", solve_flags.costs, "Cost tensor file")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--algo", solve_flags.algo, "exhaustive, proposed, greedy or random")
      ->capture_default_str();
  solve->add_option("--seed", solve_flags.seed, "Seed for the random allocator")
      ->capture_default_str();
  solve->add_option("--budget", solve_flags.budget, "Node budget for exhaustive search")
      ->capture_default_str();
  solve->add_option("--out", solve_flags.out, "Write the allocation here instead of stdout");

  CheckFlags check_flags;
  auto* check = app.add_subcommand("check", "Validate a scenario and optionally an allocation");
  check->add_option("--scenario", check_flags.scenario, "Scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--allocation", check_flags.allocation, "Allocation file (JSON)")
      ->check(CLI::ExistingFile);
  check->add_option("--costs", check_flags.costs, "Cost tensor file to shape-check")
      ->check(CLI::ExistingFile);

  GenerateFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Write one generated trial instance to files");
  gen->add_option("--config", gen_flags.config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_flags.seed, "Override master seed");
  gen->add_option("--trial", gen_flags.trial, "Trial index")->capture_default_str();
  gen->add_option("--out", gen_flags.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep_cmd) return cmd_sweep(sweep_flags);
    if (*solve) return cmd_solve(solve_flags);
    if (*check) return cmd_check(check_flags);
    if (*gen) return cmd_generate(gen_flags);
  } catch (const InfeasibleAssignment& e) {
    fmt::print(stderr, "error [infeasible]: {}\n", e.what());
    return kRefused;
  } catch (const BudgetExceeded& e) {
    fmt::print(stderr, "error [budget]: {}\n", e.what());
    return kRefused;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error [config]: {}\n", e.what());
    return kBadInput;
  } catch (const LoadError& e) {
    fmt::print(stderr, "error [load]: {}\n", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error [input]: {}\n", e.what());
    return kBadInput;
  }
  return kUsage;
}

// Monte Carlo experiments: scenario generation, per-trial evaluation of the
// allocators and CSV/manifest output.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidealloc/baselines.hpp"
#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"
#include "sidealloc/metrics.hpp"

namespace sidealloc {

inline constexpr const char* kVersion = "0.3.0";

enum class Algorithm { kExhaustive, kProposed, kGreedy, kRandom };

const char* algorithm_name(Algorithm a);
/// Throws ConfigError for an unknown name.
Algorithm parse_algorithm(const std::string& name);
/// Comma-separated list, e.g. "proposed,greedy".
std::vector<Algorithm> parse_algorithm_list(const std::string& list);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain of clusters: cluster j and j+1 share
/// ceil(overlap_fraction · min(N_j, N_{j+1})) vehicles.
struct TopologyConfig {
  std::size_t clusters = 2;
  std::size_t cluster_size = 5;
  std::vector<std::size_t> sizes;  // overrides cluster_size when non-empty
  double overlap_fraction = 0.2;

  std::vector<std::size_t> resolved_sizes() const;
};

struct ExperimentConfig {
  int version = 1;
  std::size_t subframes = 5;
  std::size_t subchannels = 3;
  TopologyConfig topology;
  ChannelConfig channel;  // channel.seed is replaced per trial
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::kExhaustive, Algorithm::kProposed,
                                    Algorithm::kGreedy, Algorithm::kRandom};
  std::uint64_t exhaustive_node_budget = kDefaultSearchNodeBudget;
  /// Cluster sizes visited by sweep(); each point replaces topology sizes.
  std::vector<std::size_t> sweep_cluster_sizes;
  std::string out_dir = "results";
  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Throws ConfigError on a violated invariant or an unsatisfiable topology.
void validate_config(const ExperimentConfig& cfg);

// Config documents are JSON; every key is optional and defaults as above:
//   {"version": 1,
//    "grid": {"L": 5, "K": 3},
//    "topology": {"clusters": 2, "cluster_size": 5, "sizes": [5, 4],
//                 "overlap_fraction": 0.2},
//    "channel": {"bandwidth_mhz": 1.26, "sinr_db_mean": 18,
//                "sinr_db_stddev": 8, "frequency_correlation": 0},
//    "trials": 200, "seed": 7,
//    "algorithms": ["exhaustive", "proposed", "greedy", "random"],
//    "exhaustive_node_budget": 200000000,
//    "sweep": {"cluster_sizes": [4, 5, 6, 7, 8]},
//    "out": "results", "threads": 0}
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// Seed streams under the master seed; trial t of stream s uses
/// derive_seed(master, s, t).
inline constexpr std::uint64_t kChannelStream = 1;
inline constexpr std::uint64_t kRandomAllocStream = 2;

/// Chain-topology scenario with vehicles numbered along the chain.
Scenario chain_scenario(std::size_t subframes, std::size_t subchannels,
                        const TopologyConfig& topology);

struct TrialInstance {
  Scenario scenario;
  CostTensor costs;
};

/// Deterministic in (cfg, trial).
TrialInstance generate_scenario(const ExperimentConfig& cfg, std::size_t trial);

struct AlgorithmOutcome {
  Algorithm algorithm;
  Allocation allocation;
  RateSummary summary;
  double objective = 0.0;
};

struct TrialOutcome {
  std::size_t trial = 0;
  std::size_t vehicles = 0;
  std::vector<AlgorithmOutcome> outcomes;  // in cfg.algorithms order, minus skipped
  std::vector<std::string> warnings;

  const AlgorithmOutcome* find(Algorithm a) const;
};

/// Runs every selected algorithm on one generated instance. An exhaustive
/// search that exceeds its node budget is skipped with a warning.
TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t trial);

/// Trials 0..cfg.trials-1, possibly in parallel, returned in trial order.
std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<TrialOutcome> trials;
  std::vector<std::string> warnings;
};

inline constexpr const char* kTrialCsvHeader = "algo,trial,N,highest,mean,worst,stddev,unassigned";
inline constexpr const char* kSummaryCsvHeader =
    "algo,N,trials,highest,mean,worst,stddev,unassigned";
inline constexpr const char* kSweepCsvHeader = "N,cluster_size,algo,trials,worst";

std::string trials_csv(const std::vector<TrialOutcome>& trials, bool header = true);
std::string summary_csv(const ExperimentConfig& cfg, const std::vector<TrialOutcome>& trials);

/// Writes <out>/trials.csv, <out>/summary.csv and <out>/manifest.json.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct CurvePoint {
  std::size_t cluster_size = 0;
  std::size_t vehicles = 0;
  Algorithm algorithm;
  std::size_t trials = 0;
  double mean_worst = 0.0;
};

struct SweepResult {
  std::vector<CurvePoint> curve;                     // point-major, cfg.algorithms order
  std::vector<std::vector<TrialOutcome>> by_point;   // per sweep point
  std::vector<std::string> warnings;
};

/// Mean worst-vehicle rate per algorithm at each sweep point. Trial seeds
/// are shared across points, so points are paired trial by trial.
SweepResult worst_rate_curve(const ExperimentConfig& cfg);

std::string sweep_csv(const SweepResult& r);

/// worst_rate_curve plus <out>/sweep.csv, <out>/sweep_trials.csv and
/// <out>/manifest.json.
SweepResult sweep(const ExperimentConfig& cfg);

}  // namespace sidealloc

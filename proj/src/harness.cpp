#include "sidealloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include <fmt/core.h>
#include "json.hpp"

#include "sidealloc/assignment.hpp"
#include "sidealloc/hierarchical.hpp"
#include "sidealloc/rng.hpp"
#include "text_io.hpp"

namespace sidealloc {

using json = nlohmann::json;

namespace {

constexpr Algorithm kAllAlgorithms[] = {Algorithm::kExhaustive, Algorithm::kProposed,
                                        Algorithm::kGreedy, Algorithm::kRandom};

std::size_t shared_count(double fraction, std::size_t a, std::size_t b) {
  // The epsilon keeps products such as 0.2 * 5 from rounding up to 2.
  return static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(std::min(a, b)) - 1e-9));
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kExhaustive: return "exhaustive";
    case Algorithm::kProposed: return "proposed";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kRandom: return "random";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : kAllAlgorithms) {
    if (name == algorithm_name(a)) return a;
  }
  throw ConfigError(fmt::format("unknown algorithm '{}' (expected exhaustive, proposed, greedy "
                                "or random)",
                                name));
}

std::vector<Algorithm> parse_algorithm_list(const std::string& list) {
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string name = list.substr(start, end - start);
    if (!name.empty()) {
      const Algorithm a = parse_algorithm(name);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("empty algorithm list");
  return out;
}

std::vector<std::size_t> TopologyConfig::resolved_sizes() const {
  if (!sizes.empty()) return sizes;
  return std::vector<std::size_t>(clusters, cluster_size);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.version != 1) throw ConfigError(fmt::format("config version {} unsupported", cfg.version));
  if (cfg.subframes == 0 || cfg.subchannels == 0) throw ConfigError("grid needs L >= 1 and K >= 1");
  if (cfg.trials == 0) throw ConfigError("trials must be >= 1");
  if (cfg.algorithms.empty()) throw ConfigError("no algorithms selected");
  const auto& topo = cfg.topology;
  if (!(topo.overlap_fraction >= 0.0 && topo.overlap_fraction <= 1.0)) {
    throw ConfigError("overlap_fraction must lie in [0, 1]");
  }
  try {
    validate_channel_config(cfg.channel);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto check_sizes = [&](const std::vector<std::size_t>& sizes) {
    if (sizes.empty()) throw ConfigError("topology needs at least one cluster");
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      if (sizes[j] == 0) throw ConfigError(fmt::format("cluster {} has size 0", j));
      if (sizes[j] > cfg.subframes) {
        throw ConfigError(fmt::format("cluster {} has {} vehicles but only L = {} subframes", j,
                                      sizes[j], cfg.subframes));
      }
      const std::size_t left = j > 0 ? shared_count(topo.overlap_fraction, sizes[j - 1], sizes[j]) : 0;
      const std::size_t right =
          j + 1 < sizes.size() ? shared_count(topo.overlap_fraction, sizes[j], sizes[j + 1]) : 0;
      if (left + right > sizes[j]) {
        throw ConfigError(fmt::format("cluster {} of size {} cannot share {} + {} vehicles with "
                                      "its neighbours",
                                      j, sizes[j], left, right));
      }
    }
  };
  check_sizes(topo.resolved_sizes());
  for (std::size_t size : cfg.sweep_cluster_sizes) {
    TopologyConfig point = topo;
    point.sizes.clear();
    point.cluster_size = size;
    check_sizes(point.resolved_sizes());
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  try {
    cfg.version = doc.value("version", cfg.version);
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      cfg.subframes = g.value("L", cfg.subframes);
      cfg.subchannels = g.value("K", cfg.subchannels);
    }
    if (doc.contains("topology")) {
      const auto& t = doc.at("topology");
      cfg.topology.clusters = t.value("clusters", cfg.topology.clusters);
      cfg.topology.cluster_size = t.value("cluster_size", cfg.topology.cluster_size);
      cfg.topology.sizes = t.value("sizes", cfg.topology.sizes);
      cfg.topology.overlap_fraction = t.value("overlap_fraction", cfg.topology.overlap_fraction);
    }
    if (doc.contains("channel")) {
      const auto& c = doc.at("channel");
      cfg.channel.bandwidth_mhz = c.value("bandwidth_mhz", cfg.channel.bandwidth_mhz);
      cfg.channel.sinr_db_mean = c.value("sinr_db_mean", cfg.channel.sinr_db_mean);
      cfg.channel.sinr_db_stddev = c.value("sinr_db_stddev", cfg.channel.sinr_db_stddev);
      cfg.channel.frequency_correlation =
          c.value("frequency_correlation", cfg.channel.frequency_correlation);
    }
    cfg.trials = doc.value("trials", cfg.trials);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& name : doc.at("algorithms")) {
        cfg.algorithms.push_back(parse_algorithm(name.get<std::string>()));
      }
    }
    cfg.exhaustive_node_budget = doc.value("exhaustive_node_budget", cfg.exhaustive_node_budget);
    if (doc.contains("sweep")) {
      cfg.sweep_cluster_sizes =
          doc.at("sweep").value("cluster_sizes", std::vector<std::size_t>{});
    }
    cfg.out_dir = doc.value("out", cfg.out_dir);
    cfg.threads = doc.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json algos = json::array();
  for (Algorithm a : cfg.algorithms) algos.push_back(algorithm_name(a));
  json topology = {{"clusters", cfg.topology.clusters},
                   {"cluster_size", cfg.topology.cluster_size},
                   {"overlap_fraction", cfg.topology.overlap_fraction}};
  if (!cfg.topology.sizes.empty()) topology["sizes"] = cfg.topology.sizes;
  json doc = {
      {"version", cfg.version},
      {"grid", {{"L", cfg.subframes}, {"K", cfg.subchannels}}},
      {"topology", topology},
      {"channel",
       {{"bandwidth_mhz", cfg.channel.bandwidth_mhz},
        {"sinr_db_mean", cfg.channel.sinr_db_mean},
        {"sinr_db_stddev", cfg.channel.sinr_db_stddev},
        {"frequency_correlation", cfg.channel.frequency_correlation}}},
      {"trials", cfg.trials},
      {"seed", cfg.seed},
      {"algorithms", algos},
      {"exhaustive_node_budget", cfg.exhaustive_node_budget},
      {"sweep", {{"cluster_sizes", cfg.sweep_cluster_sizes}}},
      {"out", cfg.out_dir},
      {"threads", cfg.threads},
  };
  return doc.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(detail::read_file(path));
}

Scenario chain_scenario(std::size_t subframes, std::size_t subchannels,
                        const TopologyConfig& topology) {
  const auto sizes = topology.resolved_sizes();
  std::vector<std::vector<VehicleId>> clusters;
  VehicleId start = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (j > 0) start -= shared_count(topology.overlap_fraction, sizes[j - 1], sizes[j]);
    std::vector<VehicleId> members(sizes[j]);
    for (std::size_t p = 0; p < sizes[j]; ++p) members[p] = start + p;
    start += sizes[j];
    clusters.push_back(std::move(members));
  }
  ResourceGrid grid;
  grid.subframes = subframes;
  grid.subchannels = subchannels;
  return Scenario(grid, start, std::move(clusters));
}

TrialInstance generate_scenario(const ExperimentConfig& cfg, std::size_t trial) {
  validate_config(cfg);
  auto scenario = chain_scenario(cfg.subframes, cfg.subchannels, cfg.topology);
  ChannelConfig channel = cfg.channel;
  channel.seed = derive_seed(cfg.seed, kChannelStream, trial);
  auto costs = sample_cost_tensor(scenario, channel);
  return {std::move(scenario), std::move(costs)};
}

const AlgorithmOutcome* TrialOutcome::find(Algorithm a) const {
  for (const auto& o : outcomes) {
    if (o.algorithm == a) return &o;
  }
  return nullptr;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t trial) {
  const auto instance = generate_scenario(cfg, trial);
  const auto& s = instance.scenario;
  const auto& c = instance.costs;

  TrialOutcome out;
  out.trial = trial;
  out.vehicles = s.vehicle_count();
  for (Algorithm algo : cfg.algorithms) {
    Allocation a;
    switch (algo) {
      case Algorithm::kExhaustive:
        try {
          a = exhaustive_global(s, c, cfg.exhaustive_node_budget).allocation;
        } catch (const BudgetExceeded& e) {
          out.warnings.push_back(fmt::format("trial {}: exhaustive skipped: {}", trial, e.what()));
          continue;
        }
        break;
      case Algorithm::kProposed: a = allocate(s, c).allocation; break;
      case Algorithm::kGreedy: a = greedy(s, c); break;
      case Algorithm::kRandom:
        a = random_alloc(s, c, derive_seed(cfg.seed, kRandomAllocStream, trial));
        break;
    }
    AlgorithmOutcome o{algo, std::move(a), {}, 0.0};
    o.summary = summarize(o.allocation, c);
    o.objective = total_rate(o.allocation, c);
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<TrialOutcome> results(cfg.trials);
  std::size_t workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, cfg.trials);
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.trials; ++t) results[t] = run_trial(cfg, t);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < cfg.trials; t = next++) results[t] = run_trial(cfg, t);
        } catch (...) {
          errors[w] = std::current_exception();
          next = cfg.trials;
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

namespace {

std::string trial_row(const AlgorithmOutcome& o, std::size_t trial, std::size_t vehicles) {
  const auto& s = o.summary;
  return fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", algorithm_name(o.algorithm),
                     trial, vehicles, s.highest, s.mean, s.worst, s.stddev, s.unassigned);
}

std::vector<std::string> collect_warnings(const std::vector<TrialOutcome>& trials) {
  std::vector<std::string> out;
  for (const auto& t : trials) out.insert(out.end(), t.warnings.begin(), t.warnings.end());
  return out;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings) {
  json doc = {{"tool", "sidealloc"},
              {"version", kVersion},
              {"command", command},
              {"seed", cfg.seed},
              {"seed_derivation",
               "derive_seed(master, stream, trial); stream 1 = channel, 2 = random allocator"},
              {"config", json::parse(config_to_json(cfg))},
              {"outputs", outputs},
              {"warnings", warnings}};
  detail::write_file((std::filesystem::path(cfg.out_dir) / "manifest.json").string(),
                     doc.dump(2) + "\n");
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) fmt::print(stderr, "warning: {}\n", w);
}

}  // namespace

std::string trials_csv(const std::vector<TrialOutcome>& trials, bool header) {
  std::string out = header ? std::string(kTrialCsvHeader) + "\n" : std::string();
  for (const auto& t : trials) {
    for (const auto& o : t.outcomes) out += trial_row(o, t.trial, t.vehicles);
  }
  return out;
}

std::string summary_csv(const ExperimentConfig& cfg, const std::vector<TrialOutcome>& trials) {
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  const std::size_t vehicles = trials.empty() ? 0 : trials.front().vehicles;
  for (Algorithm algo : cfg.algorithms) {
    std::vector<RateSummary> summaries;
    for (const auto& t : trials) {
      if (const auto* o = t.find(algo)) summaries.push_back(o->summary);
    }
    if (summaries.empty()) continue;
    const auto m = average(summaries);
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", algorithm_name(algo),
                       vehicles, m.trials, m.highest, m.mean, m.worst, m.stddev, m.unassigned);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentResult result;
  result.trials = run_trials(cfg);
  result.warnings = collect_warnings(result.trials);
  report_warnings(result.warnings);

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);
  detail::write_file((out / "trials.csv").string(), trials_csv(result.trials));
  detail::write_file((out / "summary.csv").string(), summary_csv(cfg, result.trials));
  write_manifest(cfg, "run", {"trials.csv", "summary.csv"}, result.warnings);
  return result;
}

SweepResult worst_rate_curve(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.sweep_cluster_sizes.empty()) throw ConfigError("sweep needs sweep.cluster_sizes");
  SweepResult result;
  for (std::size_t size : cfg.sweep_cluster_sizes) {
    ExperimentConfig point = cfg;
    point.topology.sizes.clear();
    point.topology.cluster_size = size;
    auto trials = run_trials(point);
    const auto warnings = collect_warnings(trials);
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    for (Algorithm algo : cfg.algorithms) {
      CurvePoint p{size, trials.front().vehicles, algo, 0, 0.0};
      for (const auto& t : trials) {
        if (const auto* o = t.find(algo)) {
          p.mean_worst += o->summary.worst;
          ++p.trials;
        }
      }
      if (p.trials == 0) continue;
      p.mean_worst /= static_cast<double>(p.trials);
      result.curve.push_back(p);
    }
    result.by_point.push_back(std::move(trials));
  }
  return result;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& p : r.curve) {
    out += fmt::format("{},{},{},{},{:.6f}\n", p.vehicles, p.cluster_size,
                       algorithm_name(p.algorithm), p.trials, p.mean_worst);
  }
  return out;
}

SweepResult sweep(const ExperimentConfig& cfg) {
  auto result = worst_rate_curve(cfg);
  report_warnings(result.warnings);
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);
  detail::write_file((out / "sweep.csv").string(), sweep_csv(result));
  std::string rows = std::string(kTrialCsvHeader) + "\n";
  for (const auto& trials : result.by_point) rows += trials_csv(trials, false);
  detail::write_file((out / "sweep_trials.csv").string(), rows);
  write_manifest(cfg, "sweep", {"sweep.csv", "sweep_trials.csv"}, result.warnings);
  return result;
}

}  // namespace sidealloc

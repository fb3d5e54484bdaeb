#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "oracles.hpp"
#include "sidealloc/harness.hpp"

using namespace sidealloc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const std::string& out) {
  ExperimentConfig cfg;
  cfg.subframes = 4;
  cfg.subchannels = 2;
  cfg.topology.clusters = 2;
  cfg.topology.cluster_size = 4;
  cfg.topology.overlap_fraction = 0.25;
  cfg.trials = 12;
  cfg.seed = 42;
  cfg.out_dir = out;
  cfg.threads = 2;
  return cfg;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sidealloc_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("chain_scenario without overlap is block diagonal") {
  TopologyConfig t;
  t.clusters = 3;
  t.cluster_size = 4;
  t.overlap_fraction = 0.0;
  const auto s = chain_scenario(5, 2, t);
  CHECK(s.vehicle_count() == 12);
  for (VehicleId i = 0; i < 12; ++i) CHECK(s.clusters_of(i).size() == 1);
  CHECK(s.cluster(2) == std::vector<VehicleId>{8, 9, 10, 11});
}

TEST_CASE("chain_scenario shares ceil(overlap * size) vehicles") {
  TopologyConfig t;  // two clusters of 5, overlap 0.2
  const auto s = chain_scenario(5, 3, t);
  CHECK(s.vehicle_count() == 9);
  CHECK(s.cluster(0) == std::vector<VehicleId>{0, 1, 2, 3, 4});
  CHECK(s.cluster(1) == std::vector<VehicleId>{4, 5, 6, 7, 8});
  CHECK(s.clusters_of(4).size() == 2);

  t.sizes = {4, 6, 3};
  t.overlap_fraction = 0.5;
  const auto u = chain_scenario(6, 1, t);
  CHECK(u.vehicle_count() == 4 + 6 + 3 - 2 - 2);
  CHECK(validate_scenario(u).ok());
}

TEST_CASE("generate_scenario is deterministic per trial") {
  const auto cfg = small_config("unused");
  const auto a = generate_scenario(cfg, 3);
  const auto b = generate_scenario(cfg, 3);
  CHECK(a.scenario == b.scenario);
  CHECK(a.costs == b.costs);
  CHECK_FALSE(generate_scenario(cfg, 4).costs == a.costs);
}

TEST_CASE("run_trial evaluates every algorithm without conflicts") {
  const auto cfg = small_config("unused");
  const auto instance = generate_scenario(cfg, 0);
  const auto t = run_trial(cfg, 0);
  REQUIRE(t.outcomes.size() == 4);
  for (const auto& o : t.outcomes) CHECK(oracle::conflict_free(o.allocation, instance.scenario));
  const double best = t.find(Algorithm::kExhaustive)->objective;
  for (const auto& o : t.outcomes) CHECK(o.objective <= best * (1.0 + 1e-12));
}

TEST_CASE("run_trial skips exhaustive over budget with a warning") {
  auto cfg = small_config("unused");
  cfg.exhaustive_node_budget = 5;
  const auto t = run_trial(cfg, 0);
  CHECK(t.find(Algorithm::kExhaustive) == nullptr);
  CHECK(t.outcomes.size() == 3);
  REQUIRE(t.warnings.size() == 1);
  CHECK(t.warnings[0].find("exhaustive skipped") != std::string::npos);
}

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("greedy") == Algorithm::kGreedy);
  CHECK_THROWS_AS(parse_algorithm("annealing"), ConfigError);
  CHECK(parse_algorithm_list("proposed,greedy,proposed") ==
        std::vector<Algorithm>{Algorithm::kProposed, Algorithm::kGreedy});
  CHECK_THROWS_AS(parse_algorithm_list(","), ConfigError);
}

TEST_CASE("config JSON") {
  SUBCASE("defaults and round trip") {
    const auto cfg = config_from_json("{}");
    CHECK(cfg.subframes == 5);
    CHECK(cfg.subchannels == 3);
    CHECK(cfg.topology.resolved_sizes() == std::vector<std::size_t>{5, 5});
    auto custom = small_config("out");
    custom.sweep_cluster_sizes = {2, 3, 4};
    custom.algorithms = {Algorithm::kGreedy};
    const auto back = config_from_json(config_to_json(custom));
    CHECK(config_to_json(back) == config_to_json(custom));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(config_from_json("{"), ConfigError);
    CHECK_THROWS_AS(config_from_json("[]"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"version": 2})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"trials": "many"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"grid": {"L": 0}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"algorithms": ["best"]})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"topology": {"overlap_fraction": 1.5}})"), ConfigError);
  }
  SUBCASE("unsatisfiable topology") {
    // Cluster size above L.
    CHECK_THROWS_AS(config_from_json(R"({"grid": {"L": 3}, "topology": {"cluster_size": 4}})"),
                    ConfigError);
    // Middle cluster of 2 cannot share 2 with each neighbour.
    CHECK_THROWS_AS(
        config_from_json(R"({"topology": {"sizes": [4, 2, 4], "overlap_fraction": 1.0}})"),
        ConfigError);
    // A sweep point above L.
    CHECK_THROWS_AS(config_from_json(R"({"sweep": {"cluster_sizes": [4, 6]}})"), ConfigError);
  }
}

TEST_CASE("run_experiment output is reproducible across thread counts") {
  const auto dir_a = temp_dir("run_a");
  const auto dir_b = temp_dir("run_b");
  auto cfg = small_config(dir_a.string());
  run_experiment(cfg);
  cfg.out_dir = dir_b.string();
  cfg.threads = 1;
  run_experiment(cfg);
  for (const char* f : {"trials.csv", "summary.csv"}) {
    const auto a = slurp(dir_a / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir_b / f));
  }
  const auto trials = slurp(dir_a / "trials.csv");
  CHECK(trials.rfind(std::string(kTrialCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 1 + 12 * 4);

  const auto manifest = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
  CHECK(manifest.at("seed") == 42);
  CHECK(manifest.at("command") == "run");
  CHECK(manifest.at("version") == kVersion);
  CHECK(manifest.at("config").at("trials") == 12);
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("worst_rate_curve pairs trials across points") {
  const auto dir = temp_dir("sweep");
  auto cfg = small_config(dir.string());
  cfg.algorithms = {Algorithm::kProposed, Algorithm::kGreedy};
  cfg.sweep_cluster_sizes = {2, 4};
  const auto r = sweep(cfg);
  REQUIRE(r.curve.size() == 4);
  CHECK(r.curve[0].cluster_size == 2);
  CHECK(r.curve[0].vehicles == 3);
  CHECK(r.curve[3].cluster_size == 4);
  CHECK(r.curve[3].vehicles == 7);
  CHECK(r.curve[1].algorithm == Algorithm::kGreedy);
  REQUIRE(r.by_point.size() == 2);
  CHECK(r.by_point[0].size() == 12);
  const auto csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind(std::string(kSweepCsvHeader) + "\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "sweep_trials.csv"));
  std::filesystem::remove_all(dir);

  cfg.sweep_cluster_sizes.clear();
  CHECK_THROWS_AS(worst_rate_curve(cfg), ConfigError);
}

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. argv[1] is the sidealloc executable (criterion 8).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/core.h>

#include "oracles.hpp"
#include "sidealloc/assignment.hpp"
#include "sidealloc/baselines.hpp"
#include "sidealloc/harness.hpp"
#include "sidealloc/hierarchical.hpp"
#include "sidealloc/metrics.hpp"
#include "sidealloc/reduction.hpp"

using namespace sidealloc;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct PairedTest {
  double mean = 0.0;
  double t = 0.0;
  double critical = 0.0;
  bool significant = false;
};

// One-sided paired t-test of H1: mean(d) > 0 at level alpha.
PairedTest one_sided_paired(const std::vector<double>& d, double alpha = 0.05) {
  PairedTest out;
  const double n = static_cast<double>(d.size());
  for (double x : d) out.mean += x;
  out.mean /= n;
  double sq = 0.0;
  for (double x : d) sq += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(sq / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  out.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  if (sd == 0.0) {
    out.t = out.mean > 0.0 ? INFINITY : 0.0;
  } else {
    out.t = out.mean / (sd / std::sqrt(n));
  }
  out.significant = out.t > out.critical;
  return out;
}

std::string describe(const std::string& label, const PairedTest& p) {
  return fmt::format("{}: mean diff {:+.4f}, t = {:.2f} (crit {:.2f})", label, p.mean, p.t,
                     p.critical);
}

ResourceGrid grid_of(std::size_t subframes, std::size_t subchannels) {
  ResourceGrid g;
  g.subframes = subframes;
  g.subchannels = subchannels;
  return g;
}

std::vector<VehicleId> iota_ids(std::size_t n) {
  std::vector<VehicleId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Alternates uniform tensors with channel-model tensors.
CostTensor instance_tensor(std::mt19937_64& rng, const Scenario& s, std::size_t index) {
  if (index % 2 == 0) {
    return oracle::random_tensor(rng, s.vehicle_count(), s.grid().subframes,
                                 s.grid().subchannels);
  }
  ChannelConfig ch;
  ch.seed = rng();
  return sample_cost_tensor(s, ch);
}

Verdict reduction_preserves_optimality() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  double worst_rel = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    for (std::size_t n = 2; n <= 5; ++n) {
      for (std::size_t k = 1; k <= 3; ++k) {
        const Scenario s(grid_of(n, k), n, {iota_ids(n)});
        const auto c = instance_tensor(rng, s, instances);
        const double brute = brute_force_cluster(c).objective;

        const auto reduced = reduce_costs(c);
        AssignmentProblem p(n, n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t l = 0; l < n; ++l) p.set_weight(i, l, reduced.value(i, l));
        }
        const auto grants = lift_assignment(solve_assignment(p).column_of_row, reduced);
        double lifted = 0.0;
        for (std::size_t i = 0; i < n; ++i) lifted += c.at(i, grants[i]);

        const double rel = std::abs(brute - lifted) / std::max(1.0, std::abs(brute));
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-9) ++mismatches;
        ++instances;
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {instances >= 1000 && mismatches == 0 && seconds < 60.0,
          fmt::format("{} instances, {} mismatches, max rel diff {:.2e}, {:.1f} s", instances,
                      mismatches, worst_rel, seconds)};
}

Verdict smoothing_bound() {
  // Evaluating s - d in floating point adds at most a few ulps of d.
  std::mt19937_64 rng(202);
  const double betas[] = {1.0, 10.0, 100.0, 1000.0};
  std::size_t tensors = 0;
  std::size_t violations = 0;
  double worst_excess = -INFINITY;
  double max_dev_at_1000 = 0.0;
  double bound_at_1000 = 0.0;
  bool dev_ok = true;
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t n = 1 + rep % 6;
    const std::size_t subframes = 1 + rep % 5;
    const std::size_t k = 1 + rep % 4;
    const auto c = oracle::random_tensor(rng, n, subframes, k, rep % 3 == 0 ? 1.0 : 40.0);
    const auto exact = reduce_costs(c);
    for (double beta : betas) {
      const auto smooth = smoothed_reduce(c, beta);
      const double bound = std::log(static_cast<double>(k)) / beta;
      double max_dev = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < subframes; ++l) {
          const double d = exact.value(i, l);
          const double dev = smooth[i * subframes + l] - d;
          const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, d);
          worst_excess = std::max(worst_excess, dev - bound);
          if (dev < 0.0 || dev > bound + slack) ++violations;
          max_dev = std::max(max_dev, dev);
        }
      }
      if (beta == 1000.0) {
        max_dev_at_1000 = std::max(max_dev_at_1000, max_dev);
        bound_at_1000 = std::max(bound_at_1000, bound);
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() * 40.0;
        dev_ok = dev_ok && max_dev <= bound + slack;
      }
    }
    ++tensors;
  }
  return {tensors >= 100 && violations == 0 && dev_ok,
          fmt::format("{} tensors x 4 betas, {} violations, max (dev - ln K/beta) {:.2e}, "
                      "beta=1000 max dev {:.2e} <= {:.2e}",
                      tensors, violations, worst_excess, max_dev_at_1000, bound_at_1000)};
}

Verdict conflict_freedom() {
  std::mt19937_64 rng(303);
  const double overlaps[] = {0.0, 0.2, 0.5};
  std::size_t triples = 0;
  std::size_t conflicted = 0;
  std::size_t skipped = 0;
  std::size_t per_overlap[3] = {0, 0, 0};
  for (int o = 0; o < 3; ++o) {
    std::size_t made = 0;
    while (made < 900) {
      ExperimentConfig cfg;
      cfg.subframes = 2 + rng() % 6;
      cfg.subchannels = 1 + rng() % 3;
      cfg.topology.clusters = 1 + rng() % 4;
      cfg.topology.sizes.clear();
      for (std::size_t j = 0; j < cfg.topology.clusters; ++j) {
        cfg.topology.sizes.push_back(1 + rng() % cfg.subframes);
      }
      cfg.topology.overlap_fraction = overlaps[o];
      cfg.seed = rng();
      try {
        validate_config(cfg);
      } catch (const ConfigError&) {
        continue;
      }
      const auto inst = generate_scenario(cfg, made);
      const auto& s = inst.scenario;
      const auto& c = inst.costs;
      std::vector<Allocation> produced;
      produced.push_back(allocate(s, c).allocation);
      produced.push_back(greedy(s, c));
      produced.push_back(random_alloc(s, c, rng()));
      try {
        produced.push_back(exhaustive_global(s, c, 2'000'000).allocation);
      } catch (const BudgetExceeded&) {
        ++skipped;
      }
      for (const auto& a : produced) {
        if (!find_conflicts(a, s).empty()) ++conflicted;
        ++triples;
        ++per_overlap[o];
      }
      ++made;
    }
  }
  return {triples >= 10000 && conflicted == 0,
          fmt::format("{} triples (overlap 0/0.2/0.5: {}/{}/{}), {} with conflicts, {} exhaustive "
                      "over budget",
                      triples, per_overlap[0], per_overlap[1], per_overlap[2], conflicted,
                      skipped)};
}

Verdict near_optimality() {
  std::mt19937_64 rng(404);
  std::size_t instances = 0;
  std::size_t above = 0;
  double ratio_sum = 0.0;
  double ratio_min = 1.0;
  while (instances < 600) {
    const std::size_t subframes = 2 + rng() % 4;
    const std::size_t subchannels = 1 + rng() % 3;
    const std::size_t clusters = 1 + rng() % 3;
    std::optional<Scenario> s;
    if (instances % 2 == 0) {
      const std::size_t n = std::min<std::size_t>(2 + rng() % 7, clusters * subframes);
      s = oracle::random_scenario(rng, n, clusters, subframes, subchannels);
    } else {
      TopologyConfig t;
      t.sizes.clear();
      for (std::size_t j = 0; j < clusters; ++j) t.sizes.push_back(1 + rng() % subframes);
      t.overlap_fraction = 0.5 * static_cast<double>(rng() % 3) / 2.0;
      ExperimentConfig cfg;
      cfg.subframes = subframes;
      cfg.subchannels = subchannels;
      cfg.topology = t;
      try {
        validate_config(cfg);
      } catch (const ConfigError&) {
        continue;
      }
      s = chain_scenario(subframes, subchannels, t);
    }
    if (s->vehicle_count() > 8) continue;
    const auto c = instance_tensor(rng, *s, instances);
    const double opt = exhaustive_global(*s, c).objective;
    const double got = allocate(*s, c).objective;
    // Equal-valued allocations may differ in summation rounding.
    if (got > opt * (1.0 + 1e-12)) ++above;
    const double ratio = opt > 0.0 ? got / opt : 1.0;
    ratio_sum += ratio;
    ratio_min = std::min(ratio_min, ratio);
    ++instances;
  }
  const double mean_ratio = ratio_sum / static_cast<double>(instances);
  return {instances >= 500 && above == 0 && mean_ratio >= 0.95,
          fmt::format("{} instances, {} above optimum, mean ratio {:.4f}, min ratio {:.4f}",
                      instances, above, mean_ratio, ratio_min)};
}

ExperimentConfig desk_config() {
  ExperimentConfig cfg;  // L = 5, K = 3, two clusters of 5 sharing 1 vehicle, N = 9
  cfg.trials = 500;
  cfg.seed = 2024;
  cfg.threads = 0;
  return cfg;
}

std::vector<double> paired(const std::vector<TrialOutcome>& trials, Algorithm a, Algorithm b,
                           double RateSummary::*field) {
  std::vector<double> d;
  for (const auto& t : trials) {
    const auto* x = t.find(a);
    const auto* y = t.find(b);
    if (x && y) d.push_back(x->summary.*field - y->summary.*field);
  }
  return d;
}

Verdict ordering_trend() {
  const auto cfg = desk_config();
  const auto trials = run_trials(cfg);
  const auto ex_pr = one_sided_paired(
      paired(trials, Algorithm::kExhaustive, Algorithm::kProposed, &RateSummary::mean));
  const auto pr_gr = one_sided_paired(
      paired(trials, Algorithm::kProposed, Algorithm::kGreedy, &RateSummary::mean));
  const auto gr_ra = one_sided_paired(
      paired(trials, Algorithm::kGreedy, Algorithm::kRandom, &RateSummary::mean));
  const auto worst = one_sided_paired(
      paired(trials, Algorithm::kProposed, Algorithm::kGreedy, &RateSummary::worst));
  std::size_t exhaustive_trials = 0;
  for (const auto& t : trials) exhaustive_trials += t.find(Algorithm::kExhaustive) != nullptr;
  const bool pass = exhaustive_trials == trials.size() && ex_pr.significant &&
                    pr_gr.significant && gr_ra.significant && worst.significant;
  return {pass, fmt::format("{} trials; mean rate {}; {}; {}; worst rate {}", trials.size(),
                            describe("exh-prop", ex_pr), describe("prop-greedy", pr_gr),
                            describe("greedy-random", gr_ra), describe("prop-greedy", worst))};
}

Verdict overload_trend() {
  ExperimentConfig base;
  base.subframes = 8;
  base.subchannels = 3;
  base.topology.clusters = 2;
  base.topology.overlap_fraction = 0.2;
  base.trials = 500;
  base.seed = 4242;
  base.algorithms = {Algorithm::kProposed, Algorithm::kGreedy};

  auto half = base;
  half.topology.cluster_size = 4;  // N_j / L = 0.5
  auto full = base;
  full.topology.cluster_size = 8;  // N_j / L = 1.0
  const auto at_half = run_trials(half);
  const auto at_full = run_trials(full);

  const auto gap_half = paired(at_half, Algorithm::kProposed, Algorithm::kGreedy,
                               &RateSummary::worst);
  const auto gap_full = paired(at_full, Algorithm::kProposed, Algorithm::kGreedy,
                               &RateSummary::worst);
  std::vector<double> growth(gap_full.size());
  for (std::size_t t = 0; t < growth.size(); ++t) growth[t] = gap_full[t] - gap_half[t];
  const auto test = one_sided_paired(growth);
  const auto at_max = one_sided_paired(gap_full);

  double half_mean = 0.0, full_mean = 0.0;
  for (double g : gap_half) half_mean += g;
  for (double g : gap_full) full_mean += g;
  half_mean /= static_cast<double>(gap_half.size());
  full_mean /= static_cast<double>(gap_full.size());
  return {test.significant && at_max.significant,
          fmt::format("{} paired trials per point; greedy worst-rate deficit {:.4f} at load 0.5, "
                      "{:.4f} at load 1.0; {}; {}",
                      growth.size(), half_mean, full_mean, describe("growth", test),
                      describe("deficit at full load", at_max))};
}

Verdict solver_exactness() {
  std::mt19937_64 rng(707);
  std::size_t matrices = 0;
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1400; ++rep) {
    const std::size_t n = 1 + rep % 7;
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    // Small integers force many ties; the rest are continuous.
    const bool integral = rep % 2 == 0;
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (auto& row : w) {
      for (auto& x : row) x = integral ? static_cast<double>(rng() % 10) : u(rng);
    }
    const double solved = solve_assignment(AssignmentProblem(w)).objective;
    if (solved != *oracle::best_permutation(w)) ++mismatches;
    ++matrices;
  }
  return {matrices >= 1000 && mismatches == 0,
          fmt::format("{} matrices (n = 1..7, half integer-valued), {} mismatches", matrices,
                      mismatches)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const std::string& cli) {
  const auto root = std::filesystem::temp_directory_path() / "sidealloc_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  auto cfg = desk_config();
  cfg.trials = 200;
  {
    std::ofstream(root / "config.json") << config_to_json(cfg);
  }
  std::size_t compared = 0;
  bool identical = true;
  for (const char* run : {"a", "b"}) {
    const std::string cmd =
        fmt::format("\"{}\" run --config \"{}\" --out \"{}\" > \"{}\" 2>&1", cli,
                    (root / "config.json").string(), (root / run).string(),
                    (root / (std::string(run) + ".log")).string());
    if (std::system(cmd.c_str()) != 0) {
      return {false, fmt::format("`{}` failed", cmd)};
    }
  }
  for (const char* file : {"trials.csv", "summary.csv"}) {
    const auto a = slurp(root / "a" / file);
    const auto b = slurp(root / "b" / file);
    identical = identical && !a.empty() && a == b;
    ++compared;
  }
  std::filesystem::remove_all(root);
  return {identical && compared == 2,
          fmt::format("2 runs of {} trials, trials.csv and summary.csv {}", cfg.trials,
                      identical ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    fmt::print(stderr, "usage: {} <path to sidealloc executable>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 reduction preserves cluster optimality", reduction_preserves_optimality},
      {"2 smoothed reduction within ln(K)/beta", smoothing_bound},
      {"3 conflict-free allocations", conflict_freedom},
      {"4 near-optimality versus exhaustive", near_optimality},
      {"5 desk-scale ordering", ordering_trend},
      {"6 greedy deficit grows with load", overload_trend},
      {"7 assignment solver exactness", solver_exactness},
      {"8 repeated run is byte-identical", [&] { return determinism(cli); }},
  };
  bool all = true;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    all = all && v.pass;
    fmt::print("[{}] criterion {}: {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}

#include "sidealloc/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "sidealloc/assignment.hpp"
#include "sidealloc/metrics.hpp"
#include "sidealloc/rng.hpp"

namespace sidealloc {

namespace {

void check_inputs(const Scenario& s, const CostTensor& c) {
  if (const auto report = validate_scenario(s); !report.ok()) {
    throw std::invalid_argument("invalid scenario: " + report.message);
  }
  if (!c.matches(s)) {
    throw std::domain_error(fmt::format("cost tensor {}x{}x{} does not match scenario {}x{}x{}",
                                        c.vehicles(), c.subframes(), c.subchannels(),
                                        s.vehicle_count(), s.grid().subframes,
                                        s.grid().subchannels));
  }
}

class GlobalSearch {
 public:
  GlobalSearch(const Scenario& s, const CostTensor& c, std::uint64_t budget)
      : s_(s), c_(c), budget_(budget), blocker_(s), current_(s.vehicle_count()),
        subframe_best_(s.vehicle_count() * s.grid().subframes),
        best_subchannel_(s.vehicle_count() * s.grid().subframes) {
    for (VehicleId i = 0; i < s.vehicle_count(); ++i) {
      for (std::size_t l = 0; l < s.grid().subframes; ++l) {
        const auto row = c.cell_row(i, l);
        const auto top = std::max_element(row.begin(), row.end());
        subframe_best_[i * s.grid().subframes + l] = *top;
        best_subchannel_[i * s.grid().subframes + l] =
            static_cast<std::size_t>(top - row.begin());
      }
    }
  }

  void seed(const Allocation& a, double value) {
    best_ = a;
    // Slightly below the seed so a search leaf equal to it is still recorded.
    best_value_ = value - 1e-12 * std::abs(value);
  }

  void run() { descend(0, 0.0); }

  const Allocation& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  // Best rate every vehicle from `from` on could still obtain alone.
  double optimistic(VehicleId from) const {
    const std::size_t subframes = s_.grid().subframes;
    double sum = 0.0;
    for (VehicleId i = from; i < s_.vehicle_count(); ++i) {
      double top = 0.0;
      for (std::size_t l = 0; l < subframes; ++l) {
        if (!blocker_.blocked(i, l)) top = std::max(top, subframe_best_[i * subframes + l]);
      }
      sum += top;
    }
    return sum;
  }

  void descend(VehicleId i, double value) {
    if (++nodes_ > budget_) {
      throw BudgetExceeded(fmt::format("exhaustive search exceeded {} nodes", budget_), nodes_,
                           budget_);
    }
    if (i == s_.vehicle_count()) {
      if (value > best_value_) {
        best_value_ = value;
        best_ = current_;
      }
      return;
    }
    if (value + optimistic(i) <= best_value_) return;

    // Subchannels never conflict, so within a subframe only the best one
    // (lowest index on ties) can be part of an optimum.
    const std::size_t subframes = s_.grid().subframes;
    for (std::size_t l = 0; l < subframes; ++l) {
      if (blocker_.blocked(i, l)) continue;
      blocker_.occupy(i, l);
      current_.assign(i, {l, best_subchannel_[i * subframes + l]});
      descend(i + 1, value + subframe_best_[i * subframes + l]);
      blocker_.release(i, l);
    }
    current_.clear(i);
    descend(i + 1, value);
  }

  const Scenario& s_;
  const CostTensor& c_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  SubframeBlocker blocker_;
  Allocation current_;
  Allocation best_;
  double best_value_ = -std::numeric_limits<double>::infinity();
  std::vector<double> subframe_best_;
  std::vector<std::size_t> best_subchannel_;
};

}  // namespace

ExhaustiveResult exhaustive_global(const Scenario& s, const CostTensor& c,
                                   std::uint64_t node_budget) {
  check_inputs(s, c);
  GlobalSearch search(s, c, node_budget);
  const auto start = greedy(s, c);
  search.seed(start, total_rate(start, c));
  search.run();
  ExhaustiveResult out{search.best(), 0.0, search.nodes()};
  out.objective = total_rate(out.allocation, c);
  return out;
}

Allocation greedy(const Scenario& s, const CostTensor& c) {
  check_inputs(s, c);
  const std::size_t n = s.vehicle_count();
  const std::size_t subframes = s.grid().subframes;
  const std::size_t subchannels = s.grid().subchannels;

  std::vector<double> peak(n, 0.0);
  for (VehicleId i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < subframes; ++l) {
      for (double v : c.cell_row(i, l)) peak[i] = std::max(peak[i], v);
    }
  }
  std::vector<VehicleId> order(n);
  std::iota(order.begin(), order.end(), VehicleId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](VehicleId a, VehicleId b) { return peak[a] > peak[b]; });

  Allocation a(n);
  SubframeBlocker blocker(s);
  for (VehicleId i : order) {
    std::optional<Grant> best;
    double best_rate = -1.0;
    for (std::size_t l = 0; l < subframes; ++l) {
      if (blocker.blocked(i, l)) continue;
      for (std::size_t k = 0; k < subchannels; ++k) {
        if (c(i, l, k) > best_rate) {
          best_rate = c(i, l, k);
          best = Grant{l, k};
        }
      }
    }
    if (!best) continue;
    a.assign(i, *best);
    blocker.occupy(i, best->subframe);
  }
  return a;
}

Allocation random_alloc(const Scenario& s, const CostTensor& c, std::uint64_t seed) {
  check_inputs(s, c);
  const std::size_t n = s.vehicle_count();
  const std::size_t subframes = s.grid().subframes;
  const std::size_t subchannels = s.grid().subchannels;

  Engine rng(seed);
  std::vector<VehicleId> order(n);
  std::iota(order.begin(), order.end(), VehicleId{0});
  for (std::size_t p = n; p > 1; --p) std::swap(order[p - 1], order[uniform_index(rng, p)]);

  Allocation a(n);
  SubframeBlocker blocker(s);
  std::vector<std::size_t> free_subframes;
  for (VehicleId i : order) {
    free_subframes.clear();
    for (std::size_t l = 0; l < subframes; ++l) {
      if (!blocker.blocked(i, l)) free_subframes.push_back(l);
    }
    if (free_subframes.empty()) continue;
    const std::size_t cell = uniform_index(rng, free_subframes.size() * subchannels);
    const Grant g{free_subframes[cell / subchannels], cell % subchannels};
    a.assign(i, g);
    blocker.occupy(i, g.subframe);
  }
  return a;
}

}  // namespace sidealloc

#include "sidealloc/hierarchical.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "sidealloc/reduction.hpp"

namespace sidealloc {

std::vector<ClusterId> ClusterOrder::sequence() const {
  std::vector<ClusterId> out;
  out.reserve(ranks.size());
  for (const auto& r : ranks) out.push_back(r.cluster);
  return out;
}

namespace {

ClusterRank rank_cluster(const Scenario& s, ClusterId j) {
  ClusterRank r{j, static_cast<double>(s.cluster(j).size()) /
                       static_cast<double>(s.grid().subframes),
                0};
  for (VehicleId i : s.cluster(j)) {
    if (s.clusters_of(i).size() > 1) ++r.shared;
  }
  return r;
}

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

}  // namespace

ClusterOrder constrainedness_order(const Scenario& s) {
  ClusterOrder order;
  for (ClusterId j = 0; j < s.cluster_count(); ++j) order.ranks.push_back(rank_cluster(s, j));
  // Loads share the denominator L, so comparing member counts is exact.
  std::sort(order.ranks.begin(), order.ranks.end(),
            [&](const ClusterRank& a, const ClusterRank& b) {
              const auto na = s.cluster(a.cluster).size();
              const auto nb = s.cluster(b.cluster).size();
              if (na != nb) return na > nb;
              if (a.shared != b.shared) return a.shared > b.shared;
              return a.cluster < b.cluster;
            });
  return order;
}

HierarchicalResult allocate(const Scenario& s, const CostTensor& c) {
  check_inputs(s, c);
  auto order = constrainedness_order(s);
  auto result = allocate(s, c, order.sequence());
  result.order = std::move(order);
  return result;
}

HierarchicalResult allocate(const Scenario& s, const CostTensor& c,
                            const std::vector<ClusterId>& order) {
  check_inputs(s, c);
  {
    std::vector<ClusterId> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = sorted.size() == s.cluster_count();
    for (std::size_t p = 0; permutation && p < sorted.size(); ++p) permutation = sorted[p] == p;
    if (!permutation) {
      throw std::invalid_argument(fmt::format("cluster order {} is not a permutation of 0..{}",
                                              order, s.cluster_count() - 1));
    }
  }

  const std::size_t subframes = s.grid().subframes;
  HierarchicalResult result;
  result.allocation = Allocation(s.vehicle_count());
  for (ClusterId j : order) result.order.ranks.push_back(rank_cluster(s, j));

  SubframeBlocker blocker(s);
  for (ClusterId j : order) {
    ClusterStep step{j, {}, {}, 0.0};
    std::vector<VehicleId> open;
    for (VehicleId i : s.cluster(j)) {
      (result.allocation.assigned(i) ? step.fixed : open).push_back(i);
    }
    if (open.empty()) {
      result.steps.push_back(std::move(step));
      continue;
    }

    const auto reduced = reduce_costs(c.rows(open));
    AssignmentProblem problem(open.size(), subframes);
    for (std::size_t r = 0; r < open.size(); ++r) {
      for (std::size_t l = 0; l < subframes; ++l) {
        problem.set_weight(r, l, reduced.value(r, l));
        if (blocker.blocked(open[r], l)) problem.block(r, l);
      }
    }
    const auto matched = solve_assignment_partial(problem);
    const auto grants = lift_assignment(matched.column_of_row, reduced);

    ClusterShortfall shortfall{j, {}, {}, {}};
    for (std::size_t r = 0; r < open.size(); ++r) {
      const VehicleId i = open[r];
      if (!grants[r]) {
        shortfall.unassigned.push_back(i);
        continue;
      }
      result.allocation.assign(i, *grants[r]);
      blocker.occupy(i, grants[r]->subframe);
      step.solved.push_back(i);
      step.objective += c(i, grants[r]->subframe, grants[r]->subchannel);
    }
    if (!shortfall.unassigned.empty()) {
      for (auto hv : matched.violators) {
        for (auto& row : hv.rows) row = open[row];
        shortfall.violators.push_back(std::move(hv));
      }
      shortfall.message =
          fmt::format("cluster {}: vehicles {} left unassigned, earlier grants block their "
                      "remaining subframes",
                      j, shortfall.unassigned);
      result.shortfalls.push_back(std::move(shortfall));
    }
    result.objective += step.objective;
    result.steps.push_back(std::move(step));
  }
  return result;
}

}  // namespace sidealloc

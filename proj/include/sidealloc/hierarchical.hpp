// Hierarchical allocation: clusters are solved one at a time, most
// constrained first. Each cluster's still-unserved members are matched to
// subframes through the macro-vertex reduction; grants made earlier are kept
// and block their subframe for every cluster of the granted vehicle.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sidealloc/assignment.hpp"
#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"

namespace sidealloc {

struct ClusterRank {
  ClusterId cluster = 0;
  double load = 0.0;           // N_j / L
  std::size_t shared = 0;      // members that also belong to another cluster
};

/// Clusters sorted by load descending, then shared-member count
/// descending, then id ascending.
struct ClusterOrder {
  std::vector<ClusterRank> ranks;

  std::vector<ClusterId> sequence() const;
};

ClusterOrder constrainedness_order(const Scenario& s);

/// Members of one cluster that could not be served once earlier grants
/// blocked their subframes.
struct ClusterShortfall {
  ClusterId cluster = 0;
  std::vector<VehicleId> unassigned;
  /// Vehicles whose free subframes (columns) are too few for all of them.
  std::vector<HallViolator> violators;  // rows/columns in vehicle ids / subframes
  std::string message;
};

struct ClusterStep {
  ClusterId cluster = 0;
  std::vector<VehicleId> fixed;   // already granted through an earlier cluster
  std::vector<VehicleId> solved;  // granted in this step
  double objective = 0.0;         // rate sum over `solved`
};

struct HierarchicalResult {
  Allocation allocation;
  ClusterOrder order;
  std::vector<ClusterStep> steps;  // in processing order
  std::vector<ClusterShortfall> shortfalls;
  double objective = 0.0;
};

/// Throws std::domain_error when the tensor shape does not match the
/// scenario and std::invalid_argument for an invalid scenario.
HierarchicalResult allocate(const Scenario& s, const CostTensor& c);

/// Same, with an explicit processing order (a permutation of cluster ids).
HierarchicalResult allocate(const Scenario& s, const CostTensor& c,
                            const std::vector<ClusterId>& order);

}  // namespace sidealloc

// Resource lattice, vehicle clusters and allocations.
//
// A period is split into L subframes of K subchannels each. Vehicles that
// share a cluster must transmit in different subframes (half-duplex), so
// every solver in this library produces allocations that satisfy
// find_conflicts(...) == {}.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sidealloc {

using VehicleId = std::size_t;
using ClusterId = std::size_t;

struct ResourceGrid {
  std::size_t subframes = 1;    // L
  std::size_t subchannels = 1;  // K
  double subframe_duration_ms = 1.0;
  double subchannel_bandwidth_mhz = 1.26;

  std::size_t resource_count() const { return subframes * subchannels; }
};

/// One time-frequency cell: subframe l in [0, L), subchannel k in [0, K).
struct Grant {
  std::size_t subframe = 0;
  std::size_t subchannel = 0;

  friend bool operator==(const Grant&, const Grant&) = default;
  friend auto operator<=>(const Grant&, const Grant&) = default;
};

/// Flat resource index r = l*K + k, the 0-based form of the macro-vertex
/// labelling (subframe l owns resources [l*K, (l+1)*K)). Throws
/// std::domain_error when l or k is outside the grid.
std::size_t resource_index(std::size_t subframe, std::size_t subchannel,
                           const ResourceGrid& grid);
Grant resource_cell(std::size_t index, const ResourceGrid& grid);

/// Vehicles 0..N-1 grouped into J (possibly overlapping) clusters. The
/// membership matrix U is stored row-wise as sorted member lists; the dense
/// 0/1 view is available through member().
class Scenario {
 public:
  Scenario() = default;
  Scenario(ResourceGrid grid, std::size_t vehicle_count,
           std::vector<std::vector<VehicleId>> clusters);

  /// Builds from a dense J×N 0/1 matrix. Non-binary entries throw
  /// std::invalid_argument.
  static Scenario from_membership(ResourceGrid grid,
                                  const std::vector<std::vector<int>>& u);

  const ResourceGrid& grid() const { return grid_; }
  std::size_t vehicle_count() const { return vehicle_count_; }
  std::size_t cluster_count() const { return clusters_.size(); }

  const std::vector<VehicleId>& cluster(ClusterId j) const { return clusters_.at(j); }
  const std::vector<std::vector<VehicleId>>& clusters() const { return clusters_; }
  /// Clusters containing vehicle i, ascending.
  const std::vector<ClusterId>& clusters_of(VehicleId i) const { return vehicle_clusters_.at(i); }
  bool member(ClusterId j, VehicleId i) const;

  /// Vehicles sharing at least one cluster with i (excluding i), ascending.
  std::vector<VehicleId> neighbours(VehicleId i) const;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.grid_.subframes == b.grid_.subframes &&
           a.grid_.subchannels == b.grid_.subchannels &&
           a.vehicle_count_ == b.vehicle_count_ && a.clusters_ == b.clusters_;
  }

 private:
  ResourceGrid grid_;
  std::size_t vehicle_count_ = 0;
  std::vector<std::vector<VehicleId>> clusters_;
  std::vector<std::vector<ClusterId>> vehicle_clusters_;
};

enum class ScenarioViolation {
  kEmptyGrid,
  kNoVehicles,
  kNoClusters,
  kUnknownVehicle,
  kDuplicateMember,
  kEmptyCluster,
  kOrphanVehicle,
  kClusterExceedsSubframes,
};

struct ScenarioReport {
  std::optional<ScenarioViolation> violation;
  std::string message;

  bool ok() const { return !violation.has_value(); }
};

/// Returns the first violated scenario invariant, or an ok report.
ScenarioReport validate_scenario(const Scenario& s);

/// Partial vehicle -> grant map. Vehicles without a grant are unassigned.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::size_t vehicle_count) : grants_(vehicle_count) {}

  std::size_t vehicle_count() const { return grants_.size(); }
  const std::optional<Grant>& grant(VehicleId i) const { return grants_.at(i); }
  const std::vector<std::optional<Grant>>& grants() const { return grants_; }

  void assign(VehicleId i, Grant g) { grants_.at(i) = g; }
  void clear(VehicleId i) { grants_.at(i).reset(); }

  bool assigned(VehicleId i) const { return grants_.at(i).has_value(); }
  std::vector<VehicleId> unassigned() const;
  std::size_t assigned_count() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::vector<std::optional<Grant>> grants_;
};

struct Conflict {
  ClusterId cluster = 0;
  std::size_t subframe = 0;
  std::vector<VehicleId> vehicles;  // >= 2, ascending

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

/// Every (cluster, subframe) pair holding more than one member grant.
/// Throws std::domain_error when the allocation size does not match the
/// scenario or a grant lies outside the grid.
std::vector<Conflict> find_conflicts(const Allocation& a, const Scenario& s);

/// Per-vehicle subframe blocking used by every sequential solver: subframe l
/// is blocked for i once any vehicle sharing a cluster with i holds l.
class SubframeBlocker {
 public:
  explicit SubframeBlocker(const Scenario& s);

  bool blocked(VehicleId i, std::size_t subframe) const;
  void occupy(VehicleId i, std::size_t subframe);
  /// Undoes occupy(i, subframe); valid only if that subframe was unblocked
  /// for i when it was occupied.
  void release(VehicleId i, std::size_t subframe);

 private:
  const Scenario* scenario_;
  std::size_t subframes_;
  // cluster-major occupancy [j * L + l]
  std::vector<unsigned char> taken_;
};

// Scenario documents are JSON:
//   {"version": 1, "L": 4, "K": 7, "N": 9, "J": 2,
//    "clusters": [[0,1,2,3,4],[4,5,6,7,8]]}
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const std::string& path, const Scenario& s);
Scenario load_scenario(const std::string& path);

// Allocation documents are JSON:
//   {"version": 1, "N": 3,
//    "grants": [{"vehicle": 0, "subframe": 1, "subchannel": 0}, ...],
//    "unassigned": [2]}
std::string allocation_to_json(const Allocation& a);
Allocation allocation_from_json(const std::string& text);
void save_allocation(const std::string& path, const Allocation& a);
Allocation load_allocation(const std::string& path);

}  // namespace sidealloc

#include "sidealloc/grid.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/core.h>
#include "json.hpp"

#include "text_io.hpp"

namespace sidealloc {

using json = nlohmann::json;
using detail::read_file;
using detail::write_file;

std::size_t resource_index(std::size_t subframe, std::size_t subchannel,
                           const ResourceGrid& grid) {
  if (subframe >= grid.subframes || subchannel >= grid.subchannels) {
    throw std::domain_error(fmt::format("cell ({}, {}) outside {}x{} grid", subframe,
                                        subchannel, grid.subframes, grid.subchannels));
  }
  return subframe * grid.subchannels + subchannel;
}

Grant resource_cell(std::size_t index, const ResourceGrid& grid) {
  if (index >= grid.resource_count()) {
    throw std::domain_error(
        fmt::format("resource {} outside grid of {}", index, grid.resource_count()));
  }
  return {index / grid.subchannels, index % grid.subchannels};
}

Scenario::Scenario(ResourceGrid grid, std::size_t vehicle_count,
                   std::vector<std::vector<VehicleId>> clusters)
    : grid_(grid), vehicle_count_(vehicle_count), clusters_(std::move(clusters)),
      vehicle_clusters_(vehicle_count) {
  for (ClusterId j = 0; j < clusters_.size(); ++j) {
    auto& members = clusters_[j];
    std::sort(members.begin(), members.end());
    for (std::size_t p = 0; p < members.size(); ++p) {
      const VehicleId i = members[p];
      // Out-of-range ids and duplicates are kept for validate_scenario to report.
      if (i >= vehicle_count_ || (p > 0 && members[p - 1] == i)) continue;
      vehicle_clusters_[i].push_back(j);
    }
  }
}

Scenario Scenario::from_membership(ResourceGrid grid, const std::vector<std::vector<int>>& u) {
  const std::size_t n = u.empty() ? 0 : u.front().size();
  std::vector<std::vector<VehicleId>> clusters(u.size());
  for (ClusterId j = 0; j < u.size(); ++j) {
    if (u[j].size() != n) throw std::invalid_argument("membership matrix is ragged");
    for (VehicleId i = 0; i < n; ++i) {
      if (u[j][i] != 0 && u[j][i] != 1) {
        throw std::invalid_argument(
            fmt::format("membership entry U[{}][{}] = {} is not binary", j, i, u[j][i]));
      }
      if (u[j][i] == 1) clusters[j].push_back(i);
    }
  }
  return Scenario(grid, n, std::move(clusters));
}

bool Scenario::member(ClusterId j, VehicleId i) const {
  const auto& members = clusters_.at(j);
  return std::binary_search(members.begin(), members.end(), i);
}

std::vector<VehicleId> Scenario::neighbours(VehicleId i) const {
  std::vector<VehicleId> out;
  for (ClusterId j : clusters_of(i)) {
    for (VehicleId v : clusters_[j]) {
      if (v != i) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ScenarioReport validate_scenario(const Scenario& s) {
  auto fail = [](ScenarioViolation v, std::string msg) {
    return ScenarioReport{v, std::move(msg)};
  };
  const auto& grid = s.grid();
  if (grid.subframes == 0 || grid.subchannels == 0) {
    return fail(ScenarioViolation::kEmptyGrid, "grid needs L >= 1 and K >= 1");
  }
  if (s.vehicle_count() == 0) return fail(ScenarioViolation::kNoVehicles, "no vehicles");
  if (s.cluster_count() == 0) return fail(ScenarioViolation::kNoClusters, "no clusters");

  for (ClusterId j = 0; j < s.cluster_count(); ++j) {
    const auto& members = s.cluster(j);
    if (members.empty()) {
      return fail(ScenarioViolation::kEmptyCluster, fmt::format("cluster {} is empty", j));
    }
    for (std::size_t p = 0; p < members.size(); ++p) {
      if (members[p] >= s.vehicle_count()) {
        return fail(ScenarioViolation::kUnknownVehicle,
                    fmt::format("cluster {} lists unknown vehicle {}", j, members[p]));
      }
      if (p > 0 && members[p - 1] == members[p]) {
        return fail(ScenarioViolation::kDuplicateMember,
                    fmt::format("cluster {} lists vehicle {} twice", j, members[p]));
      }
    }
    if (members.size() > grid.subframes) {
      return fail(ScenarioViolation::kClusterExceedsSubframes,
                  fmt::format("cluster exceeds subframes: cluster {} has {} members, L = {}", j,
                              members.size(), grid.subframes));
    }
  }
  for (VehicleId i = 0; i < s.vehicle_count(); ++i) {
    if (s.clusters_of(i).empty()) {
      return fail(ScenarioViolation::kOrphanVehicle,
                  fmt::format("orphan vehicle {} belongs to no cluster", i));
    }
  }
  return {};
}

std::vector<VehicleId> Allocation::unassigned() const {
  std::vector<VehicleId> out;
  for (VehicleId i = 0; i < grants_.size(); ++i) {
    if (!grants_[i]) out.push_back(i);
  }
  return out;
}

std::size_t Allocation::assigned_count() const {
  return static_cast<std::size_t>(
      std::count_if(grants_.begin(), grants_.end(), [](const auto& g) { return g.has_value(); }));
}

std::vector<Conflict> find_conflicts(const Allocation& a, const Scenario& s) {
  if (a.vehicle_count() != s.vehicle_count()) {
    throw std::domain_error(fmt::format("allocation covers {} vehicles, scenario has {}",
                                        a.vehicle_count(), s.vehicle_count()));
  }
  const auto& grid = s.grid();
  for (VehicleId i = 0; i < a.vehicle_count(); ++i) {
    const auto& g = a.grant(i);
    if (g && (g->subframe >= grid.subframes || g->subchannel >= grid.subchannels)) {
      throw std::domain_error(fmt::format("vehicle {} granted ({}, {}) outside {}x{} grid", i,
                                          g->subframe, g->subchannel, grid.subframes,
                                          grid.subchannels));
    }
  }

  std::vector<Conflict> out;
  for (ClusterId j = 0; j < s.cluster_count(); ++j) {
    std::map<std::size_t, std::vector<VehicleId>> by_subframe;
    for (VehicleId i : s.cluster(j)) {
      if (i < a.vehicle_count() && a.grant(i)) by_subframe[a.grant(i)->subframe].push_back(i);
    }
    for (auto& [l, vehicles] : by_subframe) {
      if (vehicles.size() > 1) out.push_back({j, l, std::move(vehicles)});
    }
  }
  return out;
}

SubframeBlocker::SubframeBlocker(const Scenario& s)
    : scenario_(&s), subframes_(s.grid().subframes),
      taken_(s.cluster_count() * s.grid().subframes, 0) {}

bool SubframeBlocker::blocked(VehicleId i, std::size_t subframe) const {
  for (ClusterId j : scenario_->clusters_of(i)) {
    if (taken_[j * subframes_ + subframe]) return true;
  }
  return false;
}

void SubframeBlocker::occupy(VehicleId i, std::size_t subframe) {
  for (ClusterId j : scenario_->clusters_of(i)) taken_[j * subframes_ + subframe] = 1;
}

void SubframeBlocker::release(VehicleId i, std::size_t subframe) {
  for (ClusterId j : scenario_->clusters_of(i)) taken_[j * subframes_ + subframe] = 0;
}

namespace {

constexpr int kFormatVersion = 1;

json parse_document(const std::string& text, const char* what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(fmt::format("{} document: {}", what, e.what()));
  }
  if (!doc.is_object()) throw std::runtime_error(fmt::format("{} document must be an object", what));
  const int version = doc.value("version", kFormatVersion);
  if (version != kFormatVersion) {
    throw std::runtime_error(fmt::format("{} document version {} unsupported", what, version));
  }
  return doc;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json doc = {{"version", kFormatVersion},
              {"L", s.grid().subframes},
              {"K", s.grid().subchannels},
              {"N", s.vehicle_count()},
              {"J", s.cluster_count()},
              {"clusters", s.clusters()}};
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const json doc = parse_document(text, "scenario");
  try {
    ResourceGrid grid;
    grid.subframes = doc.at("L").get<std::size_t>();
    grid.subchannels = doc.at("K").get<std::size_t>();
    const auto n = doc.at("N").get<std::size_t>();
    auto clusters = doc.at("clusters").get<std::vector<std::vector<VehicleId>>>();
    if (doc.contains("J") && doc.at("J").get<std::size_t>() != clusters.size()) {
      throw std::runtime_error(fmt::format("scenario declares J = {} but lists {} clusters",
                                           doc.at("J").get<std::size_t>(), clusters.size()));
    }
    return Scenario(grid, n, std::move(clusters));
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("scenario document: {}", e.what()));
  }
}

void save_scenario(const std::string& path, const Scenario& s) {
  write_file(path, scenario_to_json(s));
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_file(path)); }

std::string allocation_to_json(const Allocation& a) {
  json grants = json::array();
  for (VehicleId i = 0; i < a.vehicle_count(); ++i) {
    if (const auto& g = a.grant(i)) {
      grants.push_back({{"vehicle", i}, {"subframe", g->subframe}, {"subchannel", g->subchannel}});
    }
  }
  json doc = {{"version", kFormatVersion},
              {"N", a.vehicle_count()},
              {"grants", grants},
              {"unassigned", a.unassigned()}};
  return doc.dump(2) + "\n";
}

Allocation allocation_from_json(const std::string& text) {
  const json doc = parse_document(text, "allocation");
  try {
    Allocation a(doc.at("N").get<std::size_t>());
    for (const auto& g : doc.at("grants")) {
      const auto i = g.at("vehicle").get<VehicleId>();
      if (i >= a.vehicle_count()) {
        throw std::domain_error(fmt::format("allocation grants unknown vehicle {}", i));
      }
      if (a.assigned(i)) {
        throw std::runtime_error(fmt::format("vehicle {} granted twice", i));
      }
      a.assign(i, {g.at("subframe").get<std::size_t>(), g.at("subchannel").get<std::size_t>()});
    }
    return a;
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("allocation document: {}", e.what()));
  }
}

void save_allocation(const std::string& path, const Allocation& a) {
  write_file(path, allocation_to_json(a));
}

Allocation load_allocation(const std::string& path) {
  return allocation_from_json(read_file(path));
}

}  // namespace sidealloc

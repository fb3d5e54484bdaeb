// Comparison allocators: exhaustive global search, greedy and random.

#pragma once

#include <cstdint>

#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"

namespace sidealloc {

inline constexpr std::uint64_t kDefaultSearchNodeBudget = 200'000'000;

struct ExhaustiveResult {
  Allocation allocation;
  double objective = 0.0;
  std::uint64_t nodes = 0;
};

/// Globally optimal conflict-free allocation by depth-first backtracking
/// over vehicles 0..N-1. Each vehicle takes its best subchannel in an
/// unblocked subframe or, as the last option, stays unassigned (so an optimum exists even when
/// overlap makes a full allocation impossible). Subtrees whose objective
/// plus the best free cell of every remaining vehicle cannot beat the
/// incumbent are pruned; the greedy allocation seeds the incumbent value.
/// Returns the lexicographically first optimum in subframe order. Throws BudgetExceeded after node_budget search nodes.
ExhaustiveResult exhaustive_global(const Scenario& s, const CostTensor& c,
                                   std::uint64_t node_budget = kDefaultSearchNodeBudget);

/// Vehicles in descending order of their best cell (ties by id) each take
/// their best cell in a subframe not yet used in any of their clusters.
Allocation greedy(const Scenario& s, const CostTensor& c);

/// Vehicles in uniformly shuffled order each take a uniformly random cell
/// among those in unblocked subframes. Deterministic per seed.
Allocation random_alloc(const Scenario& s, const CostTensor& c, std::uint64_t seed);

}  // namespace sidealloc

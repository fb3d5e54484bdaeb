// Rate statistics over an allocation.

#pragma once

#include <cstddef>
#include <vector>

#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"

namespace sidealloc {

/// Rates in Mbit/s per subchannel over the assigned vehicles. Unassigned
/// vehicles are counted, not treated as rate 0. With nobody assigned, all
/// rate fields are 0.
struct RateSummary {
  double highest = 0.0;
  double mean = 0.0;
  double worst = 0.0;
  double stddev = 0.0;  // population
  std::size_t unassigned = 0;
};

/// Rate of each assigned vehicle, in vehicle order. Throws
/// std::domain_error for a grant outside the tensor.
std::vector<double> vehicle_rates(const Allocation& a, const CostTensor& c);

RateSummary summarize(const Allocation& a, const CostTensor& c);

/// Sum of granted rates (the allocation objective).
double total_rate(const Allocation& a, const CostTensor& c);

/// Field-wise mean of per-trial summaries; the stddev field averages the
/// per-trial standard deviations.
struct SummaryMean {
  double highest = 0.0;
  double mean = 0.0;
  double worst = 0.0;
  double stddev = 0.0;
  double unassigned = 0.0;
  std::size_t trials = 0;
};

SummaryMean average(const std::vector<RateSummary>& summaries);

}  // namespace sidealloc

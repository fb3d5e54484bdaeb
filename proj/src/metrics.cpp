#include "sidealloc/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace sidealloc {

std::vector<double> vehicle_rates(const Allocation& a, const CostTensor& c) {
  std::vector<double> rates;
  rates.reserve(a.vehicle_count());
  for (VehicleId i = 0; i < a.vehicle_count(); ++i) {
    if (const auto& g = a.grant(i)) rates.push_back(c.at(i, *g));
  }
  return rates;
}

RateSummary summarize(const Allocation& a, const CostTensor& c) {
  const auto rates = vehicle_rates(a, c);
  RateSummary out;
  out.unassigned = a.vehicle_count() - rates.size();
  if (rates.empty()) return out;

  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  out.worst = *lo;
  out.highest = *hi;
  double sum = 0.0;
  for (double r : rates) sum += r;
  out.mean = sum / static_cast<double>(rates.size());
  double sq = 0.0;
  for (double r : rates) sq += (r - out.mean) * (r - out.mean);
  out.stddev = std::sqrt(sq / static_cast<double>(rates.size()));
  // Keep worst <= mean <= highest under rounding.
  out.mean = std::clamp(out.mean, out.worst, out.highest);
  return out;
}

double total_rate(const Allocation& a, const CostTensor& c) {
  double sum = 0.0;
  for (double r : vehicle_rates(a, c)) sum += r;
  return sum;
}

SummaryMean average(const std::vector<RateSummary>& summaries) {
  SummaryMean out;
  out.trials = summaries.size();
  if (summaries.empty()) return out;
  for (const auto& s : summaries) {
    out.highest += s.highest;
    out.mean += s.mean;
    out.worst += s.worst;
    out.stddev += s.stddev;
    out.unassigned += static_cast<double>(s.unassigned);
  }
  const double n = static_cast<double>(summaries.size());
  out.highest /= n;
  out.mean /= n;
  out.worst /= n;
  out.stddev /= n;
  out.unassigned /= n;
  return out;
}

}  // namespace sidealloc

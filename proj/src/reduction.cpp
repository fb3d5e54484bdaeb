#include "sidealloc/reduction.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace sidealloc {

ReducedCostMatrix reduce_costs(const CostTensor& costs) {
  if (costs.subchannels() == 0) throw std::domain_error("cost tensor has no subchannels");
  ReducedCostMatrix out(costs.vehicles(), costs.subframes());
  for (std::size_t i = 0; i < costs.vehicles(); ++i) {
    for (std::size_t l = 0; l < costs.subframes(); ++l) {
      const auto row = costs.cell_row(i, l);
      std::size_t best = 0;
      for (std::size_t k = 1; k < row.size(); ++k) {
        if (row[k] > row[best]) best = k;
      }
      out.set(i, l, row[best], best);
    }
  }
  return out;
}

std::vector<double> smoothed_reduce(const CostTensor& costs, double beta) {
  if (!(beta > 0.0)) throw std::domain_error(fmt::format("beta must be positive, got {}", beta));
  if (costs.subchannels() == 0) throw std::domain_error("cost tensor has no subchannels");
  std::vector<double> out(costs.vehicles() * costs.subframes());
  for (std::size_t i = 0; i < costs.vehicles(); ++i) {
    for (std::size_t l = 0; l < costs.subframes(); ++l) {
      const auto row = costs.cell_row(i, l);
      double peak = row[0];
      for (double v : row) peak = std::max(peak, v);
      // The peak term contributes exp(0) = 1, so sum >= 1 and the log is >= 0.
      double sum = 0.0;
      for (double v : row) sum += std::exp(beta * (v - peak));
      out[i * costs.subframes() + l] = peak + std::log(sum) / beta;
    }
  }
  return out;
}

std::vector<std::optional<Grant>> lift_assignment(
    const std::vector<std::optional<std::size_t>>& subframe_of_row,
    const ReducedCostMatrix& reduced) {
  if (subframe_of_row.size() != reduced.rows()) {
    throw std::invalid_argument(fmt::format("{} reduced grants for {} rows",
                                            subframe_of_row.size(), reduced.rows()));
  }
  std::vector<int> used(reduced.subframes(), -1);
  std::vector<std::optional<Grant>> out(subframe_of_row.size());
  for (std::size_t i = 0; i < subframe_of_row.size(); ++i) {
    if (!subframe_of_row[i]) continue;
    const std::size_t l = *subframe_of_row[i];
    if (l >= reduced.subframes()) {
      throw std::invalid_argument(fmt::format("row {} assigned subframe {} of {}", i, l,
                                              reduced.subframes()));
    }
    if (used[l] >= 0) {
      throw std::invalid_argument(
          fmt::format("rows {} and {} both assigned subframe {}", used[l], i, l));
    }
    used[l] = static_cast<int>(i);
    out[i] = Grant{l, reduced.argmax(i, l)};
  }
  return out;
}

std::vector<Grant> lift_assignment(const std::vector<std::size_t>& subframe_of_row,
                                   const ReducedCostMatrix& reduced) {
  const std::vector<std::optional<std::size_t>> wrapped(subframe_of_row.begin(),
                                                        subframe_of_row.end());
  std::vector<Grant> out;
  out.reserve(wrapped.size());
  for (const auto& g : lift_assignment(wrapped, reduced)) out.push_back(*g);
  return out;
}

}  // namespace sidealloc

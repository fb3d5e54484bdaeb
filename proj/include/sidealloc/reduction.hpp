// Macro-vertex reduction.
//
// The K subchannels of a subframe form one macro-vertex. Since a vehicle
// holds at most one cell per subframe and at most one vehicle per cluster
// may use a subframe, only the best subchannel of each (vehicle, subframe)
// pair matters: the n×L×K cluster problem collapses to an n×L assignment
// with weights d[i][l] = max_k c[i][l][k]. The max is the limit, as beta
// grows, of (1/beta)·ln(sum_k exp(beta·c[i][l][k])); smoothed_reduce
// evaluates that expression at finite beta.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"

namespace sidealloc {

/// n×L matrix of macro-vertex weights with the maximizing subchannel of
/// each entry (lowest k on ties).
class ReducedCostMatrix {
 public:
  ReducedCostMatrix() = default;
  ReducedCostMatrix(std::size_t rows, std::size_t subframes)
      : rows_(rows), subframes_(subframes), values_(rows * subframes), argmax_(rows * subframes) {}

  std::size_t rows() const { return rows_; }
  std::size_t subframes() const { return subframes_; }

  double value(std::size_t i, std::size_t l) const { return values_[i * subframes_ + l]; }
  std::size_t argmax(std::size_t i, std::size_t l) const { return argmax_[i * subframes_ + l]; }

  void set(std::size_t i, std::size_t l, double v, std::size_t k) {
    values_[i * subframes_ + l] = v;
    argmax_[i * subframes_ + l] = k;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t subframes_ = 0;
  std::vector<double> values_;
  std::vector<std::size_t> argmax_;
};

/// Exact reduction, values[i][l] = max_k costs(i, l, k). Throws
/// std::domain_error when the subchannel axis is empty.
ReducedCostMatrix reduce_costs(const CostTensor& costs);

/// (1/beta)·ln(sum_k exp(beta·c[i][l][k])) per entry, shifted by the row max
/// so large beta·c does not overflow. Row-major n×L result. Throws
/// std::domain_error for beta <= 0 or an empty subchannel axis.
std::vector<double> smoothed_reduce(const CostTensor& costs, double beta);

/// Row i's reduced subframe -> full grant (subframe, argmax subchannel).
/// Throws std::invalid_argument when two rows share a subframe or a subframe
/// is out of range.
std::vector<Grant> lift_assignment(const std::vector<std::size_t>& subframe_of_row,
                                   const ReducedCostMatrix& reduced);
/// Same, with unmatched rows passed through as nullopt.
std::vector<std::optional<Grant>> lift_assignment(
    const std::vector<std::optional<std::size_t>>& subframe_of_row,
    const ReducedCostMatrix& reduced);

}  // namespace sidealloc

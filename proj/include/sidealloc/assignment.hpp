// Exact maximum-weight assignment of rows (vehicles) to columns (subframes),
// plus the exhaustive per-cluster oracle it is checked against.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidealloc/capacity.hpp"
#include "sidealloc/grid.hpp"

namespace sidealloc {

/// n×m weights with an allowed mask; blocked cells are never matched.
class AssignmentProblem {
 public:
  AssignmentProblem(std::size_t rows, std::size_t cols);
  /// All cells allowed.
  explicit AssignmentProblem(const std::vector<std::vector<double>>& weights);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double weight(std::size_t i, std::size_t j) const { return weights_[i * cols_ + j]; }
  bool allowed(std::size_t i, std::size_t j) const { return allowed_[i * cols_ + j] != 0; }

  void set_weight(std::size_t i, std::size_t j, double w) { weights_[i * cols_ + j] = w; }
  void block(std::size_t i, std::size_t j) { allowed_[i * cols_ + j] = 0; }
  void allow(std::size_t i, std::size_t j) { allowed_[i * cols_ + j] = 1; }

  /// Rows with no allowed column at all.
  std::vector<std::size_t> empty_rows() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> weights_;
  std::vector<unsigned char> allowed_;
};

/// A row set S whose allowed columns N(S) satisfy |N(S)| < |S|, proving that
/// no matching covers every row.
struct HallViolator {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> columns;
};

class InfeasibleAssignment : public std::runtime_error {
 public:
  explicit InfeasibleAssignment(HallViolator violator);
  const HallViolator& violator() const { return violator_; }

 private:
  HallViolator violator_;
};

struct AssignmentResult {
  std::vector<std::size_t> column_of_row;
  double objective = 0.0;
};

/// Row-perfect maximum-weight matching by shortest augmenting paths with
/// potentials, O(n²m). Among augmenting choices of equal reduced cost the
/// lowest column wins. Throws InfeasibleAssignment naming a Hall violator
/// when no matching covers all rows.
AssignmentResult solve_assignment(const AssignmentProblem& p);

struct PartialAssignmentResult {
  std::vector<std::optional<std::size_t>> column_of_row;
  double objective = 0.0;
  /// One violator per row left unmatched, in row order.
  std::vector<HallViolator> violators;
};

/// Best-effort variant: rows are augmented in index order and a row that
/// admits no augmenting path is left unmatched. The result has maximum
/// cardinality and maximum weight for the set of rows it covers.
PartialAssignmentResult solve_assignment_partial(const AssignmentProblem& p);

struct ClusterSolution {
  std::vector<Grant> grants;  // one per row of the cost block
  double objective = 0.0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t budget)
      : std::runtime_error(what), required_(required), budget_(budget) {}
  std::uint64_t required() const { return required_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 50'000'000;

/// Exhaustive per-cluster optimum over injective subframe choices times
/// per-vehicle subchannel choices, with no reduction. allowed_subframes is
/// n×L (empty means everything allowed). Intended as an oracle for small
/// n: refuses with BudgetExceeded when (L!/(L-n)!)·K^n exceeds the budget
/// and throws InfeasibleAssignment if no feasible assignment exists.
ClusterSolution brute_force_cluster(const CostTensor& costs,
                                    const std::vector<std::vector<bool>>& allowed_subframes = {},
                                    std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace sidealloc

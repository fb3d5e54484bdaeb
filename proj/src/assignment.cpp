#include "sidealloc/assignment.hpp"

#include <algorithm>
#include <limits>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace sidealloc {

AssignmentProblem::AssignmentProblem(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), weights_(rows * cols, 0.0), allowed_(rows * cols, 1) {
  if (rows == 0) throw std::invalid_argument("assignment problem needs at least one row");
}

AssignmentProblem::AssignmentProblem(const std::vector<std::vector<double>>& weights)
    : AssignmentProblem(weights.size(), weights.empty() ? 0 : weights.front().size()) {
  for (std::size_t i = 0; i < rows_; ++i) {
    if (weights[i].size() != cols_) throw std::invalid_argument("weight matrix is ragged");
    std::copy(weights[i].begin(), weights[i].end(),
              weights_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
}

std::vector<std::size_t> AssignmentProblem::empty_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows_; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < cols_ && !any; ++j) any = allowed(i, j);
    if (!any) out.push_back(i);
  }
  return out;
}

InfeasibleAssignment::InfeasibleAssignment(HallViolator violator)
    : std::runtime_error(fmt::format("no row-perfect matching: rows {} reach only columns {}",
                                     violator.rows, violator.columns)),
      violator_(std::move(violator)) {}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Successive shortest augmenting paths on costs -weight. Arrays are 1-based
// with column 0 as the virtual root of each search tree. When a row cannot
// be augmented, on_dead_row receives the tree's Hall violator; the row is
// then skipped if the callback returns.
template <typename OnDeadRow>
std::vector<std::optional<std::size_t>> augmenting_paths(const AssignmentProblem& p,
                                                         OnDeadRow&& on_dead_row) {
  const std::size_t n = p.rows();
  const std::size_t m = p.cols();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    owner[0] = row;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    bool dead = false;
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        if (p.allowed(i0 - 1, j - 1)) {
          const double cur = -p.weight(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) {
        // Every unused column is unreachable: the tree rows only see the
        // used columns, one fewer than themselves.
        HallViolator hv;
        for (std::size_t j = 0; j <= m; ++j) {
          if (!used[j]) continue;
          hv.rows.push_back(owner[j] - 1);
          if (j > 0) hv.columns.push_back(j - 1);
        }
        std::sort(hv.rows.begin(), hv.rows.end());
        on_dead_row(std::move(hv));
        dead = true;
        break;
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);

    if (dead) {
      owner[0] = 0;
      continue;
    }
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::optional<std::size_t>> column_of_row(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) column_of_row[owner[j] - 1] = j - 1;
  }
  return column_of_row;
}

}  // namespace

AssignmentResult solve_assignment(const AssignmentProblem& p) {
  const auto matched =
      augmenting_paths(p, [](HallViolator hv) { throw InfeasibleAssignment(std::move(hv)); });
  AssignmentResult out;
  out.column_of_row.reserve(matched.size());
  for (std::size_t i = 0; i < matched.size(); ++i) {
    out.column_of_row.push_back(*matched[i]);
    out.objective += p.weight(i, *matched[i]);
  }
  return out;
}

PartialAssignmentResult solve_assignment_partial(const AssignmentProblem& p) {
  PartialAssignmentResult out;
  out.column_of_row =
      augmenting_paths(p, [&](HallViolator hv) { out.violators.push_back(std::move(hv)); });
  for (std::size_t i = 0; i < out.column_of_row.size(); ++i) {
    if (out.column_of_row[i]) out.objective += p.weight(i, *out.column_of_row[i]);
  }
  return out;
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

// Smallest row set violating Hall's condition, by subset enumeration.
HallViolator find_hall_violator(std::size_t n, std::size_t subframes,
                                const std::vector<std::vector<bool>>& allowed) {
  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      HallViolator hv;
      std::vector<bool> reach(subframes, false);
      for (std::size_t i = 0; i < n; ++i) {
        if (!pick[i]) continue;
        hv.rows.push_back(i);
        for (std::size_t l = 0; l < subframes; ++l) reach[l] = reach[l] || allowed[i][l];
      }
      for (std::size_t l = 0; l < subframes; ++l) {
        if (reach[l]) hv.columns.push_back(l);
      }
      if (hv.columns.size() < hv.rows.size()) return hv;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return {};
}

struct ClusterSearch {
  const CostTensor& costs;
  const std::vector<std::vector<bool>>& allowed;
  std::vector<char> taken;
  std::vector<Grant> current;
  std::vector<Grant> best;
  double best_objective = -kInf;

  void descend(std::size_t row, double objective) {
    if (row == costs.vehicles()) {
      if (objective > best_objective) {
        best_objective = objective;
        best = current;
      }
      return;
    }
    for (std::size_t l = 0; l < costs.subframes(); ++l) {
      if (taken[l] || !allowed[row][l]) continue;
      taken[l] = 1;
      for (std::size_t k = 0; k < costs.subchannels(); ++k) {
        current[row] = {l, k};
        descend(row + 1, objective + costs(row, l, k));
      }
      taken[l] = 0;
    }
  }
};

}  // namespace

ClusterSolution brute_force_cluster(const CostTensor& costs,
                                    const std::vector<std::vector<bool>>& allowed_subframes,
                                    std::uint64_t budget) {
  const std::size_t n = costs.vehicles();
  const std::size_t subframes = costs.subframes();
  const std::size_t subchannels = costs.subchannels();
  if (n == 0) return {};

  std::uint64_t leaves = 1;
  for (std::size_t r = 0; r < n; ++r) {
    leaves = saturating_mul(leaves, r < subframes ? subframes - r : 0);
    leaves = saturating_mul(leaves, subchannels);
  }
  if (leaves > budget) {
    throw BudgetExceeded(fmt::format("cluster enumeration needs {} leaves, budget {}", leaves,
                                     budget),
                         leaves, budget);
  }

  std::vector<std::vector<bool>> allowed = allowed_subframes;
  if (allowed.empty()) allowed.assign(n, std::vector<bool>(subframes, true));
  if (allowed.size() != n) throw std::invalid_argument("allowed mask row count mismatch");
  for (const auto& row : allowed) {
    if (row.size() != subframes) throw std::invalid_argument("allowed mask column count mismatch");
  }

  ClusterSearch search{costs, allowed, std::vector<char>(subframes, 0), std::vector<Grant>(n), {}};
  search.descend(0, 0.0);
  if (search.best.empty()) throw InfeasibleAssignment(find_hall_violator(n, subframes, allowed));
  return {std::move(search.best), search.best_objective};
}

}  // namespace sidealloc

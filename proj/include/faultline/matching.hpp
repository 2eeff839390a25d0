#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "faultline/error.hpp"

namespace faultline {

/// Dense worker x team cost table, row-major.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t workers, std::size_t teams, double fill = 0.0)
      : rows_(workers), cols_(teams), data_(workers * teams, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw PreconditionError("cost matrix: ragged rows");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t workers() const { return rows_; }
  std::size_t teams() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  void require_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) throw PreconditionError("cost matrix: non-finite entry");
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline void require_feasible_sizes(std::span<const std::size_t> sizes, std::size_t n) {
  if (sizes.empty()) throw InfeasibleSizes("no teams requested");
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  if (total != n)
    throw InfeasibleSizes("team sizes sum to " + std::to_string(total) + " but there are " +
                          std::to_string(n) + " workers");
}

/// Minimum-cost perfect matching on a square matrix (Kuhn-Munkres with
/// potentials, O(n^3)).  Returns the column matched to each row.
inline std::vector<std::size_t> hungarian(std::size_t n, auto&& cost) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (row_of[j]) col_of[row_of[j] - 1] = j - 1;
  return col_of;
}

/// Exact min-cost b-matching: team j is expanded into sizes[j] unit slots
/// and the n x n worker/slot assignment is solved by the Hungarian method.
inline std::vector<std::size_t> reassign_exact(const CostMatrix& costs,
                                               std::span<const std::size_t> sizes) {
  if (sizes.size() != costs.teams())
    throw PreconditionError("reassign_exact: size vector does not match the cost matrix");
  require_feasible_sizes(sizes, costs.workers());
  costs.require_finite();
  std::vector<std::size_t> team_of_slot;
  for (std::size_t j = 0; j < sizes.size(); ++j) team_of_slot.insert(team_of_slot.end(), sizes[j], j);
  const std::size_t n = costs.workers();
  const auto slot = hungarian(n, [&](std::size_t i, std::size_t s) { return costs(i, team_of_slot[s]); });
  std::vector<std::size_t> team_of(n);
  for (std::size_t i = 0; i < n; ++i) team_of[i] = team_of_slot[slot[i]];
  return team_of;
}

/// Greedy b-matching: scan edges by ascending (cost, worker, team), taking an
/// edge when the worker is unassigned and the team has room.
inline std::vector<std::size_t> reassign_greedy(const CostMatrix& costs,
                                                std::span<const std::size_t> sizes) {
  if (sizes.size() != costs.teams())
    throw PreconditionError("reassign_greedy: size vector does not match the cost matrix");
  require_feasible_sizes(sizes, costs.workers());
  costs.require_finite();
  const std::size_t n = costs.workers(), l = costs.teams();
  std::vector<std::size_t> edges(n * l);
  std::iota(edges.begin(), edges.end(), 0);
  // Edge e = i * l + j, so index order is (worker, team) order.
  std::sort(edges.begin(), edges.end(), [&](std::size_t a, std::size_t b) {
    const double ca = costs(a / l, a % l), cb = costs(b / l, b % l);
    if (ca != cb) return ca < cb;
    return a < b;
  });
  constexpr auto unassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> team_of(n, unassigned), load(l, 0);
  std::size_t placed = 0;
  for (auto e : edges) {
    const std::size_t i = e / l, j = e % l;
    if (team_of[i] != unassigned || load[j] >= sizes[j]) continue;
    team_of[i] = j;
    ++load[j];
    if (++placed == n) break;
  }
  return team_of;
}

inline double assignment_cost(const CostMatrix& costs, std::span<const std::size_t> team_of) {
  double s = 0;
  for (std::size_t i = 0; i < team_of.size(); ++i) s += costs(i, team_of[i]);
  return s;
}

}  // namespace faultline

#pragma once

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "faultline/ct_measure.hpp"
#include "faultline/encoding.hpp"
#include "faultline/error.hpp"
#include "faultline/matching.hpp"
#include "faultline/population.hpp"
#include "faultline/random.hpp"
#include "faultline/team.hpp"

namespace faultline {

enum class MatchingMode { exact, greedy };

/// `sizes` lists the target size of every team; uniform_sizes() builds the
/// equal-size case.
struct SplitterOptions {
  std::vector<std::size_t> sizes;
  MatchingMode matching = MatchingMode::exact;
  std::size_t max_iters = 100;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// Called after every iteration of every restart with the partitioning
  /// produced by that iteration.  Only invoked when threads == 1.
  std::function<void(std::size_t restart, std::size_t iteration, const Partitioning&)> on_iteration;
};

inline std::vector<std::size_t> uniform_sizes(std::size_t n, std::size_t k) {
  if (k == 0) throw InfeasibleSizes("team size must be positive");
  if (n % k != 0)
    throw InfeasibleSizes("population of " + std::to_string(n) + " is not divisible into teams of " +
                          std::to_string(k));
  return std::vector<std::size_t>(n / k, k);
}

struct RestartReport {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double initial_score = 0;
  double best_score = 0;
};

struct SplitResult {
  Partitioning partitioning;
  double score = 0;
  std::vector<RestartReport> restarts;
};

/// Seeded Fisher-Yates shuffle sliced into consecutive blocks of `sizes`.
inline Partitioning random_partitioning(const Population& pop, std::span<const std::size_t> sizes,
                                        Rng& rng) {
  require_feasible_sizes(sizes, pop.size());
  std::vector<WorkerId> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(std::span(order), rng);
  Partitioning p;
  std::size_t at = 0;
  for (auto s : sizes) {
    p.teams.emplace_back(pop, std::vector<WorkerId>(order.begin() + at, order.begin() + at + s));
    at += s;
  }
  return p;
}

/// c(i, T_j) = CT(T_j) / Delta_{k_j} for members and CT(T_j + i) / Delta_{k_j + 1}
/// otherwise, with k_j the current size of T_j.
inline CostMatrix assign_costs(const Partitioning& p, const Population& pop) {
  const std::size_t n = pop.size(), l = p.team_count(), m = pop.feature_count();
  CostMatrix costs(n, l);
  std::vector<std::size_t> team_of(n, l);
  for (std::size_t j = 0; j < l; ++j)
    for (auto id : p.teams[j].members()) team_of[id] = j;
  for (std::size_t j = 0; j < l; ++j) {
    const auto& team = p.teams[j];
    const double member_cost = ct_score(team, pop) / delta_max(team.size(), m);
    const double grown_norm = delta_max(team.size() + 1, m);
    for (WorkerId i = 0; i < n; ++i)
      costs(i, j) = team_of[i] == j ? member_cost : ct_score_with(team, pop[i], pop) / grown_norm;
  }
  return costs;
}

inline std::vector<std::size_t> reassign(const CostMatrix& costs, std::span<const std::size_t> sizes,
                                         MatchingMode mode) {
  return mode == MatchingMode::exact ? reassign_exact(costs, sizes) : reassign_greedy(costs, sizes);
}

namespace detail {

struct RestartOutcome {
  Partitioning best;
  RestartReport report;
};

/// Adds a tiny relative surcharge to every non-member entry, so that among
/// equal-cost reassignments the one leaving workers in place wins.
inline void prefer_current_team(CostMatrix& costs, const Partitioning& p) {
  double scale = 0;
  for (std::size_t i = 0; i < costs.workers(); ++i)
    for (double c : costs.row(i)) scale = std::max(scale, std::abs(c));
  const double eps = 1e-12 * std::max(scale, 1e-300);
  const auto team_of = p.assignment(costs.workers());
  for (std::size_t i = 0; i < costs.workers(); ++i)
    for (std::size_t j = 0; j < costs.teams(); ++j)
      if (team_of[i] != j) costs(i, j) += eps;
}

inline RestartOutcome splitter_restart(const Population& pop, const SplitterOptions& opt,
                                       std::size_t restart) {
  RestartOutcome out;
  out.report.seed = derive_seed(opt.seed, "init", restart);
  Rng rng(out.report.seed);
  Partitioning current = random_partitioning(pop, opt.sizes, rng);
  double best_score = partition_score(current, pop);
  out.report.initial_score = best_score;
  out.best = current;
  for (std::size_t iter = 0; iter < opt.max_iters; ++iter) {
    auto costs = assign_costs(current, pop);
    prefer_current_team(costs, current);
    const auto team_of = reassign(costs, opt.sizes, opt.matching);
    current = Partitioning::from_assignment(pop, team_of, opt.sizes.size());
    ++out.report.iterations;
    if (opt.on_iteration && opt.threads <= 1) opt.on_iteration(restart, iter, current);
    const double score = partition_score(current, pop);
    if (!(score < best_score)) break;
    best_score = score;
    out.best = current;
  }
  out.report.best_score = best_score;
  return out;
}

}  // namespace detail

/// Iterated cost assignment and b-matching reassignment from random starts.
/// Each restart stops at the first iteration that does not strictly lower
/// the partition score; the best partitioning over all restarts is returned.
inline SplitResult faultline_splitter(const Population& pop, const SplitterOptions& opt) {
  if (pop.size() == 0) throw PreconditionError("faultline_splitter: empty population");
  require_feasible_sizes(opt.sizes, pop.size());
  if (opt.max_iters < 1) throw PreconditionError("faultline_splitter: max_iters must be >= 1");
  const std::size_t restarts = std::max<std::size_t>(1, opt.restarts);
  std::vector<detail::RestartOutcome> outcomes(restarts);
  if (opt.threads <= 1 || restarts == 1) {
    for (std::size_t r = 0; r < restarts; ++r) outcomes[r] = detail::splitter_restart(pop, opt, r);
  } else {
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(opt.threads, restarts);
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < restarts; r += workers)
          outcomes[r] = detail::splitter_restart(pop, opt, r);
      });
    for (auto& th : pool) th.join();
  }
  SplitResult result;
  std::size_t best = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    result.restarts.push_back(outcomes[r].report);
    if (outcomes[r].report.best_score < outcomes[best].report.best_score) best = r;
  }
  result.partitioning = std::move(outcomes[best].best);
  result.score = outcomes[best].report.best_score;
  return result;
}

/// Builds teams one at a time: two random seeds from the remaining pool,
/// then the remaining worker that minimizes CT of the grown team (lowest id
/// on ties) until the team is full.
inline Partitioning greedy_baseline(const Population& pop, const SplitterOptions& opt) {
  require_feasible_sizes(opt.sizes, pop.size());
  Rng rng(derive_seed(opt.seed, "greedy"));
  std::vector<WorkerId> pool(pop.size());
  std::iota(pool.begin(), pool.end(), 0);
  Partitioning p;
  for (auto size : opt.sizes) {
    Team team(pop);
    const std::size_t seeds = std::min<std::size_t>(2, size);
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::size_t pick = uniform_index(rng, pool.size());
      team.add(pop[pool[pick]]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    while (team.size() < size) {
      std::size_t best = 0;
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < pool.size(); ++c) {
        const double s = ct_score_with(team, pop[pool[c]], pop);
        if (s < best_score) {  // pool stays sorted, so the first minimum has the lowest id
          best_score = s;
          best = c;
        }
      }
      team.add(pop[pool[best]]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    }
    p.teams.push_back(std::move(team));
  }
  return p;
}

/// Balanced k-means on indicator-encoded workers.  The assignment step is
/// the same slot-expanded matching used by the splitter, with squared
/// Euclidean worker-to-centroid costs, so every cluster has exactly its
/// target size.
inline Partitioning clustering_baseline(const Population& pop, const SplitterOptions& opt,
                                        std::size_t max_rounds = 20) {
  require_feasible_sizes(opt.sizes, pop.size());
  const std::size_t n = pop.size(), l = opt.sizes.size();
  std::vector<WorkerId> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0);
  const auto x = indicator_encode(pop, everyone);
  const std::size_t d = x.empty() ? 0 : x[0].size();

  // Seeds: the first l distinct encoded workers in a random order, topped
  // up with repeats when fewer than l distinct profiles exist.
  Rng rng(derive_seed(opt.seed, "clustering"));
  std::vector<WorkerId> order = everyone;
  shuffle(std::span(order), rng);
  std::vector<std::vector<double>> centroids;
  for (std::size_t r = 0; r < n && centroids.size() < l; ++r)
    if (std::find(centroids.begin(), centroids.end(), x[order[r]]) == centroids.end())
      centroids.push_back(x[order[r]]);
  for (std::size_t r = 0; centroids.size() < l; ++r) centroids.push_back(x[order[r]]);

  std::vector<std::size_t> team_of;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    CostMatrix costs(n, l);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < l; ++j) {
        double s = 0;
        for (std::size_t t = 0; t < d; ++t) s += (x[i][t] - centroids[j][t]) * (x[i][t] - centroids[j][t]);
        costs(i, j) = s;
      }
    auto next = reassign(costs, opt.sizes, opt.matching);
    const bool stable = next == team_of;
    team_of = std::move(next);
    if (stable) break;
    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < d; ++t) centroids[team_of[i]][t] += x[i][t];
    for (std::size_t j = 0; j < l; ++j)
      for (auto& v : centroids[j]) v /= static_cast<double>(opt.sizes[j]);
  }
  return Partitioning::from_assignment(pop, team_of, l);
}

}  // namespace faultline

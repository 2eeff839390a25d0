#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "faultline/error.hpp"
#include "faultline/population.hpp"
#include "faultline/random.hpp"
#include "faultline/team.hpp"

namespace faultline {

/// Group sizes of one three-valued feature and the triangle mix they
/// produce over the whole population.
struct GroupSplit {
  std::size_t x = 0, y = 0, z = 0;
  std::int64_t negative = 0;  // triples with three distinct values: x*y*z
  std::int64_t positive = 0;  // triples with one value: C(x,3)+C(y,3)+C(z,3)
  std::int64_t conflict = 0;  // the rest: exactly two share a value
  double negative_fraction = 0, positive_fraction = 0, conflict_fraction = 0;
};

inline GroupSplit make_group_split(std::size_t x, std::size_t y, std::size_t z) {
  GroupSplit s{x, y, z};
  const auto X = static_cast<std::int64_t>(x), Y = static_cast<std::int64_t>(y),
             Z = static_cast<std::int64_t>(z);
  const std::int64_t all = choose3(X + Y + Z);
  s.negative = X * Y * Z;
  s.positive = choose3(X) + choose3(Y) + choose3(Z);
  s.conflict = all - s.negative - s.positive;
  if (all > 0) {
    s.negative_fraction = static_cast<double>(s.negative) / static_cast<double>(all);
    s.positive_fraction = static_cast<double>(s.positive) / static_cast<double>(all);
    s.conflict_fraction = static_cast<double>(s.conflict) / static_cast<double>(all);
  }
  return s;
}

/// Sizes x >= y >= z with x + y + z = n minimizing
/// |neg - target_neg| + |pos - target_pos|; ties go to the largest x, then y.
inline GroupSplit best_group_split(std::size_t n, double target_neg, double target_pos) {
  GroupSplit best;
  double best_dev = std::numeric_limits<double>::infinity();
  for (std::size_t x = n + 1; x-- > 0;) {
    const std::size_t rest = n - x;
    for (std::size_t y = std::min(x, rest) + 1; y-- > 0;) {
      const std::size_t z = rest - y;
      if (z > y) break;
      const auto s = make_group_split(x, y, z);
      const double dev = std::abs(s.negative_fraction - target_neg) +
                         std::abs(s.positive_fraction - target_pos);
      if (dev < best_dev) {
        best_dev = dev;
        best = s;
      }
    }
  }
  return best;
}

struct Synth1Result {
  Population population;
  std::vector<GroupSplit> features;  // achieved split, one per feature
};

/// Each feature independently takes values X/Y/Z on groups sized to hit the
/// target fractions of all-negative and all-positive triangles, assigned
/// over a fresh random permutation of the workers.
inline Synth1Result synth1(std::size_t n, std::size_t m, double target_neg, double target_pos,
                           std::uint64_t seed) {
  if (n < 3) throw PreconditionError("synth1: need at least 3 workers");
  if (m < 1) throw PreconditionError("synth1: need at least one feature");
  if (!(target_neg >= 0 && target_neg <= 1 && target_pos >= 0 && target_pos <= 1))
    throw PreconditionError("synth1: target fractions must lie in [0, 1]");
  const auto split = best_group_split(n, target_neg, target_pos);
  std::vector<FeatureSpec> specs;
  for (std::size_t f = 0; f < m; ++f)
    specs.push_back(FeatureSpec::categorical("f" + std::to_string(f), {"X", "Y", "Z"}));
  std::vector<Worker> workers(n);
  for (std::size_t i = 0; i < n; ++i) workers[i] = Worker{i, std::vector<double>(m, 0.0)};
  for (std::size_t f = 0; f < m; ++f) {
    Rng rng(derive_seed(seed, "synth1", f));
    std::vector<WorkerId> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(std::span(order), rng);
    for (std::size_t r = 0; r < n; ++r)
      workers[order[r]].attributes[f] = r < split.x ? 0.0 : (r < split.x + split.y ? 1.0 : 2.0);
  }
  return {Population(FeatureSchema(std::move(specs)), std::move(workers)),
          std::vector<GroupSplit>(m, split)};
}

struct Synth2Options {
  std::vector<std::size_t> team_sizes{4, 8, 16, 32, 64};
  /// Empty: powers of two from 1 up to each team size.
  std::vector<std::size_t> subgroup_counts;
  std::size_t teams_per_config = 100;
  std::uint64_t seed = 0;
};

struct Synth2Team {
  std::vector<WorkerId> members;
  std::size_t team_size = 0;
  std::size_t subgroups = 0;
};

struct Synth2Result {
  Population population;
  std::vector<Synth2Team> teams;
};

inline FeatureSchema synth2_schema() {
  return FeatureSchema({
      FeatureSpec::categorical("Race", {"Asian", "White", "Black", "Native American"}),
      FeatureSpec::categorical("Country", {"USA", "China", "England", "France"}),
      FeatureSpec::categorical("Education", {"High-school", "Undergraduate", "Graduate"}),
  });
}

/// Teams made of perfectly homogeneous subgroups.  Per subgroup and
/// feature, value v is drawn with weight 1 / (1 + u(v)), u(v) being the
/// number of earlier subgroups of the same team holding v.
inline Synth2Result synth2(const Synth2Options& opt) {
  auto schema = synth2_schema();
  const std::size_t m = schema.size();
  std::vector<Worker> workers;
  std::vector<Synth2Team> teams;
  Rng rng(derive_seed(opt.seed, "synth2"));
  for (auto ts : opt.team_sizes) {
    if (ts == 0) throw PreconditionError("synth2: team size must be positive");
    std::vector<std::size_t> counts = opt.subgroup_counts;
    if (counts.empty())
      for (std::size_t sn = 1; sn <= ts; sn *= 2) counts.push_back(sn);
    for (auto sn : counts) {
      if (sn == 0) throw PreconditionError("synth2: subgroup count must be positive");
      if (sn > ts)
        throw PreconditionError("synth2: " + std::to_string(sn) + " subgroups exceed team size " +
                                std::to_string(ts));
      for (std::size_t t = 0; t < opt.teams_per_config; ++t) {
        Synth2Team team{{}, ts, sn};
        std::vector<std::vector<std::size_t>> used(m);
        for (std::size_t f = 0; f < m; ++f) used[f].assign(schema[f].cardinality(), 0);
        for (std::size_t g = 0; g < sn; ++g) {
          std::vector<double> values(m);
          for (std::size_t f = 0; f < m; ++f) {
            const std::size_t L = schema[f].cardinality();
            std::vector<double> w(L);
            for (std::size_t v = 0; v < L; ++v) w[v] = 1.0 / (1.0 + static_cast<double>(used[f][v]));
            const double total = std::accumulate(w.begin(), w.end(), 0.0);
            double u = uniform_real(rng) * total;
            std::size_t pick = L - 1;
            for (std::size_t v = 0; v < L; ++v) {
              if (u < w[v]) {
                pick = v;
                break;
              }
              u -= w[v];
            }
            ++used[f][pick];
            values[f] = static_cast<double>(pick);
          }
          const std::size_t group_size = ts / sn + (g < ts % sn ? 1 : 0);
          for (std::size_t s = 0; s < group_size; ++s) {
            team.members.push_back(workers.size());
            workers.push_back(Worker{workers.size(), values});
          }
        }
        teams.push_back(std::move(team));
      }
    }
  }
  if (workers.empty()) throw PreconditionError("synth2: no teams requested");
  return {Population(std::move(schema), std::move(workers)), std::move(teams)};
}

/// Complement edges of a simple graph on `nodes` vertices, sorted.
inline std::vector<std::pair<std::size_t, std::size_t>> complement_edges(
    std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::set<std::pair<std::size_t, std::size_t>> present;
  for (auto [a, b] : edges) {
    if (a >= nodes || b >= nodes) throw PreconditionError("graph: edge endpoint out of range");
    if (a == b) throw PreconditionError("graph: self-loops are not allowed");
    present.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < nodes; ++a)
    for (std::size_t b = a + 1; b < nodes; ++b)
      if (!present.count({a, b})) out.emplace_back(a, b);
  return out;
}

/// Hardness-reduction instance: one worker per vertex and one feature per
/// edge (a, b) of the complement graph, on which a and b share a symbol and
/// everyone else holds a unique one.  A team of size k holding both ends of
/// a complement edge then carries exactly k - 2 conflict triangles on that
/// feature, so zero-score partitions are exactly partitions into k-cliques.
inline Population clique_reduction(std::size_t nodes,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   std::size_t k) {
  if (k == 0 || nodes == 0 || nodes % k != 0)
    throw PreconditionError("clique_reduction: team size " + std::to_string(k) +
                            " does not divide " + std::to_string(nodes) + " nodes");
  const auto comp = complement_edges(nodes, edges);
  if (comp.empty())
    throw PreconditionError(
        "clique_reduction: the complement graph has no edges, so the reduction has no features");
  std::vector<FeatureSpec> specs;
  std::vector<Worker> workers(nodes);
  for (std::size_t i = 0; i < nodes; ++i) workers[i] = Worker{i, std::vector<double>(comp.size(), 0)};
  for (std::size_t f = 0; f < comp.size(); ++f) {
    const auto [a, b] = comp[f];
    std::vector<std::string> values{"pair"};
    for (std::size_t i = 0; i < nodes; ++i) {
      if (i == a || i == b) continue;
      workers[i].attributes[f] = static_cast<double>(values.size());
      values.push_back("u" + std::to_string(i));
    }
    specs.push_back(FeatureSpec::categorical("e" + std::to_string(a) + "_" + std::to_string(b),
                                             std::move(values)));
  }
  return Population(FeatureSchema(std::move(specs)), std::move(workers));
}

/// `count` random teams, each drawn without replacement.  `sizes` holds
/// one size per team, or a single size used for all of them.
inline std::vector<std::vector<WorkerId>> fake_teams(const Population& pop, std::size_t count,
                                                     const std::vector<std::size_t>& sizes,
                                                     std::uint64_t seed) {
  if (count == 0) return {};
  if (sizes.size() != count && sizes.size() != 1)
    throw PreconditionError("fake_teams: expected one size or one per team");
  Rng rng(derive_seed(seed, "fake_teams"));
  std::vector<WorkerId> pool(pop.size());
  std::vector<std::vector<WorkerId>> out;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t size = sizes.size() == 1 ? sizes[0] : sizes[t];
    if (size > pop.size())
      throw PreconditionError("fake_teams: team size " + std::to_string(size) +
                              " exceeds population " + std::to_string(pop.size()));
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < size; ++i)
      std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    std::vector<WorkerId> team(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(team.begin(), team.end());
    out.push_back(std::move(team));
  }
  return out;
}

}  // namespace faultline

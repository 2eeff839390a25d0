#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "faultline/error.hpp"
#include "faultline/population.hpp"
#include "faultline/team.hpp"

namespace faultline {

/// Triangle <(i, j), apex>: i and j agree, both disagree with the apex.
/// Canonical form has i < j.  Orientation matters: <(i,j),k> and <(i,k),j>
/// are different triangles.
struct OrientedTriangle {
  WorkerId i = 0;
  WorkerId j = 0;
  WorkerId apex = 0;

  auto operator<=>(const OrientedTriangle&) const = default;
};

inline bool agrees(const Worker& a, const Worker& b, std::size_t f, const FeatureSchema& schema) {
  const auto& spec = schema[f];
  if (spec.thresholded()) return std::abs(a.value(f) - b.value(f)) <= spec.gamma;
  if (spec.needs_binning())
    throw PreconditionError("feature '" + spec.name + "' must be discretized before scoring");
  return a.attributes[f] == b.attributes[f];
}

namespace detail {

inline void require_feature(const Population& pop, std::size_t f) {
  if (f >= pop.feature_count()) throw PreconditionError("feature index out of range");
  if (pop.schema()[f].needs_binning())
    throw PreconditionError("feature '" + pop.schema()[f].name +
                            "' must be discretized before scoring");
}

/// Which member pair of (a, b, c) is the single agreeing pair on f.
///   0: (a,b) apex c   1: (a,c) apex b   2: (b,c) apex a   -1: no conflict
inline int conflict_orientation(const Worker& a, const Worker& b, const Worker& c, std::size_t f,
                                const FeatureSchema& schema) {
  const bool ab = agrees(a, b, f, schema);
  const bool ac = agrees(a, c, f, schema);
  const bool bc = agrees(b, c, f, schema);
  if (ab + ac + bc != 1) return -1;
  return ab ? 0 : (ac ? 1 : 2);
}

inline std::int64_t enumerate_count_feature(std::span<const WorkerId> members,
                                            const Population& pop, std::size_t f) {
  std::int64_t count = 0;
  const auto& s = pop.schema();
  for (std::size_t x = 0; x < members.size(); ++x)
    for (std::size_t y = x + 1; y < members.size(); ++y)
      for (std::size_t z = y + 1; z < members.size(); ++z)
        if (conflict_orientation(pop[members[x]], pop[members[y]], pop[members[z]], f, s) >= 0)
          ++count;
  return count;
}

/// Per-feature count from a histogram of the team's symbols.
inline std::int64_t count_from_histogram(std::span<const WorkerId> members, const Population& pop,
                                         std::size_t f) {
  std::vector<std::int64_t> r(pop.schema()[f].cardinality(), 0);
  for (auto id : members) ++r[pop[id].symbol(f)];
  const auto k = static_cast<std::int64_t>(members.size());
  std::int64_t s = 0;
  for (auto c : r) s += choose2(c) * (k - c);
  return s;
}

/// Conflict triangles on f that contain `extra` together with two members.
inline std::int64_t count_new_with(std::span<const WorkerId> members, const Worker& extra,
                                   const Population& pop, std::size_t f) {
  std::int64_t count = 0;
  const auto& s = pop.schema();
  for (std::size_t x = 0; x < members.size(); ++x)
    for (std::size_t y = x + 1; y < members.size(); ++y)
      if (conflict_orientation(pop[members[x]], pop[members[y]], extra, f, s) >= 0) ++count;
  return count;
}

}  // namespace detail

/// Number of conflict triangles of the team on feature f.  Countable
/// features use the aggregate histogram; thresholded ones enumerate triples.
inline std::int64_t conflict_count_feature(const Team& team, const Population& pop, std::size_t f) {
  detail::require_feature(pop, f);
  if (pop.schema()[f].countable()) {
    if (team.has_aggregates()) return team.aggregates().conflicts(f);
    return detail::count_from_histogram(team.members(), pop, f);
  }
  return detail::enumerate_count_feature(team.members(), pop, f);
}

/// Sum over features of conflict_count_feature: the number of
/// (triangle, feature) incidences, i.e. m * CT(T).
inline std::int64_t conflict_incidences(const Team& team, const Population& pop) {
  if (team.has_aggregates()) return team.aggregates().total_conflicts();
  std::int64_t s = 0;
  for (std::size_t f = 0; f < pop.feature_count(); ++f) s += conflict_count_feature(team, pop, f);
  return s;
}

/// All conflict triangles of the team, per feature, by O(m |T|^3) enumeration.
inline std::vector<std::vector<OrientedTriangle>> enumerate_conflicts(const Team& team,
                                                                      const Population& pop) {
  const auto& s = pop.schema();
  const auto& mem = team.members();
  std::vector<std::vector<OrientedTriangle>> out(pop.feature_count());
  for (std::size_t f = 0; f < pop.feature_count(); ++f) {
    detail::require_feature(pop, f);
    for (std::size_t x = 0; x < mem.size(); ++x)
      for (std::size_t y = x + 1; y < mem.size(); ++y)
        for (std::size_t z = y + 1; z < mem.size(); ++z) {
          const WorkerId a = mem[x], b = mem[y], c = mem[z];
          switch (detail::conflict_orientation(pop[a], pop[b], pop[c], f, s)) {
            case 0: out[f].push_back({a, b, c}); break;
            case 1: out[f].push_back({a, c, b}); break;
            case 2: out[f].push_back({b, c, a}); break;
            default: break;
          }
        }
  }
  return out;
}

/// Faultline potential CT(T): sum over distinct conflict triangles of the
/// fraction of features on which each one is a conflict.
inline double ct_score(const Team& team, const Population& pop) {
  return static_cast<double>(conflict_incidences(team, pop)) /
         static_cast<double>(pop.feature_count());
}

/// CT(T + w) without modifying the team.
inline double ct_score_with(const Team& team, const Worker& w, const Population& pop) {
  if (team.contains(w.id)) throw PreconditionError("ct_score_with: worker already in team");
  std::int64_t s = 0;
  if (team.has_aggregates()) {
    const auto& agg = team.aggregates();
    for (std::size_t f = 0; f < pop.feature_count(); ++f)
      s += agg.conflicts_if_added(f, w.symbol(f));
  } else {
    std::vector<WorkerId> grown = team.members();
    grown.push_back(w.id);
    for (std::size_t f = 0; f < pop.feature_count(); ++f) {
      if (pop.schema()[f].countable())
        s += detail::count_from_histogram(grown, pop, f);
      else
        s += conflict_count_feature(team, pop, f) + detail::count_new_with(team.members(), w, pop, f);
    }
  }
  return static_cast<double>(s) / static_cast<double>(pop.feature_count());
}

/// Applies the delta to the team and returns its new CT score.
inline double ct_delta(Team& team, const Worker& w, Delta d, const Population& pop) {
  apply_member_delta(team, w, d);
  return ct_score(team, pop);
}

/// Like ct_score, but a conflict on a `weighted` feature counts the mean
/// gap (|w_i - w_apex| + |w_j - w_apex|) / 2 instead of 1.
inline double weighted_ct_score(const Team& team, const Population& pop) {
  const auto& s = pop.schema();
  const auto triangles = enumerate_conflicts(team, pop);
  double total = 0;
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    if (s[f].agreement != Agreement::weighted) {
      total += static_cast<double>(triangles[f].size());
      continue;
    }
    for (const auto& t : triangles[f]) {
      const double apex = pop[t.apex].value(f);
      total += 0.5 * (std::abs(pop[t.i].value(f) - apex) + std::abs(pop[t.j].value(f) - apex));
    }
  }
  return total / static_cast<double>(pop.feature_count());
}

/// Largest possible number of (triangle, feature) conflict incidences in
/// a team of size k: m * floor(k/2) * ceil(k/2) * (k - 2) / 2, attained by
/// a balanced two-value split on every feature.  Returns 1 for k < 3.
inline double delta_max(std::size_t k, std::size_t m) {
  if (k < 3) return 1.0;
  const auto lo = static_cast<double>(k / 2), hi = static_cast<double>(k - k / 2);
  return static_cast<double>(m) * lo * hi * static_cast<double>(k - 2) / 2.0;
}

/// counts[x] = number of oriented triangles that are conflicts on exactly
/// x features, x = 0..m.  Each unordered triple contributes 3 orientations.
struct AlignmentHistogram {
  std::vector<std::int64_t> counts;

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  bool operator==(const AlignmentHistogram&) const = default;
};

inline AlignmentHistogram alignment_histogram(const Team& team, const Population& pop) {
  const std::size_t m = pop.feature_count();
  const auto& s = pop.schema();
  const auto& mem = team.members();
  for (std::size_t f = 0; f < m; ++f) detail::require_feature(pop, f);
  AlignmentHistogram h{std::vector<std::int64_t>(m + 1, 0)};
  for (std::size_t x = 0; x < mem.size(); ++x)
    for (std::size_t y = x + 1; y < mem.size(); ++y)
      for (std::size_t z = y + 1; z < mem.size(); ++z) {
        std::size_t per_orientation[3] = {0, 0, 0};
        for (std::size_t f = 0; f < m; ++f) {
          const int o = detail::conflict_orientation(pop[mem[x]], pop[mem[y]], pop[mem[z]], f, s);
          if (o >= 0) ++per_orientation[o];
        }
        for (auto c : per_orientation) ++h.counts[c];
      }
  return h;
}

/// Penalization scheme g(0..m) for alignment-weighted scoring.
struct PenaltyScheme {
  std::vector<double> g;

  std::size_t feature_count() const { return g.empty() ? 0 : g.size() - 1; }

  /// g(x) = x: PCT equals m * CT.
  static PenaltyScheme linear(std::size_t m) {
    PenaltyScheme p;
    for (std::size_t x = 0; x <= m; ++x) p.g.push_back(static_cast<double>(x));
    return p;
  }

  /// Shifts all entries so that g(0) = 0.
  PenaltyScheme normalized() const {
    PenaltyScheme p = *this;
    if (!p.g.empty()) {
      const double g0 = p.g[0];
      for (auto& v : p.g) v -= g0;
    }
    return p;
  }

  double max() const { return g.empty() ? 0.0 : *std::max_element(g.begin(), g.end()); }
};

inline PenaltyScheme penalty_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("penalty: expected a JSON array of numbers");
  PenaltyScheme p;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("penalty: expected a JSON array of numbers");
    p.g.push_back(v.get<double>());
  }
  if (p.g.empty()) throw ParseError("penalty: empty scheme");
  return p;
}

inline PenaltyScheme load_penalty(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open penalty file '" + path + "'");
  try {
    nlohmann::json j;
    in >> j;
    return penalty_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("penalty '" + path + "': " + e.what());
  }
}

inline void save_penalty(const PenaltyScheme& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << nlohmann::json(p.g).dump() << '\n';
}

inline double pct_score(const AlignmentHistogram& h, const PenaltyScheme& g) {
  if (g.g.size() != h.counts.size())
    throw PreconditionError("pct_score: penalty scheme has length " + std::to_string(g.g.size()) +
                            ", expected " + std::to_string(h.counts.size()));
  double s = 0;
  for (std::size_t x = 1; x < h.counts.size(); ++x) s += g.g[x] * static_cast<double>(h.counts[x]);
  return s;
}

/// PCT(T, g) = sum_{x>=1} g(x) * aligned(x, T).
inline double pct_score(const Team& team, const Population& pop, const PenaltyScheme& g) {
  if (g.g.size() != pop.feature_count() + 1)
    throw PreconditionError("pct_score: penalty scheme has length " + std::to_string(g.g.size()) +
                            ", expected " + std::to_string(pop.feature_count() + 1));
  return pct_score(alignment_histogram(team, pop), g);
}

/// Total faultline potential sum_i CT(T_i).
inline double partition_score(const Partitioning& p, const Population& pop) {
  std::int64_t s = 0;
  for (const auto& t : p.teams) s += conflict_incidences(t, pop);
  return static_cast<double>(s) / static_cast<double>(pop.feature_count());
}

/// partition_score / C(n, 3); 0 when n < 3.
inline double normalized_partition_score(const Partitioning& p, const Population& pop) {
  const auto triples = static_cast<double>(choose3(static_cast<std::int64_t>(pop.size())));
  if (triples <= 0) return 0.0;
  return partition_score(p, pop) / triples;
}

}  // namespace faultline

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "faultline/ct_measure.hpp"
#include "faultline/encoding.hpp"
#include "faultline/error.hpp"
#include "faultline/population.hpp"
#include "faultline/stats.hpp"
#include "faultline/team.hpp"

namespace faultline {

/// Subgroup Strength: population standard deviation, over all member
/// pairs, of the number of features on which the pair agrees.
inline double ss_score(const Team& team, const Population& pop) {
  const auto& mem = team.members();
  if (mem.size() < 2) throw PreconditionError("ss_score: team needs at least two members");
  std::vector<double> overlaps;
  overlaps.reserve(mem.size() * (mem.size() - 1) / 2);
  for (std::size_t a = 0; a < mem.size(); ++a)
    for (std::size_t b = a + 1; b < mem.size(); ++b) {
      std::size_t o = 0;
      for (std::size_t f = 0; f < pop.feature_count(); ++f)
        o += agrees(pop[mem[a]], pop[mem[b]], f, pop.schema()) ? 1 : 0;
      overlaps.push_back(static_cast<double>(o));
    }
  return stats::population_stddev(overlaps);
}

/// Labels 0..c-1 for each member, c = cluster_count.
struct ClusterConfiguration {
  std::vector<std::size_t> labels;
  std::size_t cluster_count = 0;

  bool operator==(const ClusterConfiguration&) const = default;
};

enum class Linkage { ward, average };

/// Symmetric pairwise distance table.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  static DistanceMatrix euclidean(const std::vector<std::vector<double>>& rows) {
    DistanceMatrix m(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = a + 1; b < rows.size(); ++b) {
        double s = 0;
        for (std::size_t t = 0; t < rows[a].size(); ++t)
          s += (rows[a][t] - rows[b][t]) * (rows[a][t] - rows[b][t]);
        m(a, b) = m(b, a) = std::sqrt(s);
      }
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t a, std::size_t b) { return d_[a * n_ + b]; }
  double operator()(std::size_t a, std::size_t b) const { return d_[a * n_ + b]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Relabels clusters 0..c-1 in order of first appearance.
inline ClusterConfiguration canonical_configuration(const std::vector<std::size_t>& raw) {
  std::vector<std::size_t> map(raw.size() + 1, std::numeric_limits<std::size_t>::max());
  ClusterConfiguration c;
  for (auto r : raw) {
    if (r >= map.size()) map.resize(r + 1, std::numeric_limits<std::size_t>::max());
    if (map[r] == std::numeric_limits<std::size_t>::max()) map[r] = c.cluster_count++;
    c.labels.push_back(map[r]);
  }
  return c;
}

/// Agglomerative clustering with Lance-Williams updates (Ward on squared
/// distances, average linkage on plain distances).  Returns the cut of the
/// dendrogram for every cluster count c = n-1 down to 2.  Ties merge the
/// lowest-indexed pair.
inline std::vector<ClusterConfiguration> agglomerative_configurations(const DistanceMatrix& dist,
                                                                      Linkage linkage) {
  const std::size_t n = dist.size();
  std::vector<ClusterConfiguration> out;
  if (n < 3) return out;
  DistanceMatrix d(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      d(a, b) = linkage == Linkage::ward ? dist(a, b) * dist(a, b) : dist(a, b);
  std::vector<std::size_t> cluster_of(n), weight(n, 1);
  std::iota(cluster_of.begin(), cluster_of.end(), 0);
  std::vector<char> alive(n, 1);
  for (std::size_t clusters = n; clusters > 2; --clusters) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b)
        if (alive[b] && d(a, b) < best) {
          best = d(a, b);
          bi = a;
          bj = b;
        }
    }
    const double ni = static_cast<double>(weight[bi]), nj = static_cast<double>(weight[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      double updated;
      if (linkage == Linkage::ward) {
        const double nk = static_cast<double>(weight[k]);
        updated = ((ni + nk) * d(k, bi) + (nj + nk) * d(k, bj) - nk * d(bi, bj)) / (ni + nj + nk);
      } else {
        updated = (ni * d(k, bi) + nj * d(k, bj)) / (ni + nj);
      }
      d(k, bi) = d(bi, k) = updated;
    }
    alive[bj] = 0;
    weight[bi] += weight[bj];
    for (auto& c : cluster_of)
      if (c == bj) c = bi;
    out.push_back(canonical_configuration(cluster_of));
  }
  return out;
}

/// Per-member sums of distances to each cluster, so that a single move
/// and the silhouette average can both be evaluated in O(n c).
class SilhouetteState {
 public:
  SilhouetteState(const DistanceMatrix& dist, const ClusterConfiguration& config)
      : dist_(&dist), labels_(config.labels), sizes_(config.cluster_count, 0),
        sums_(config.labels.size() * config.cluster_count, 0.0), c_(config.cluster_count) {
    for (auto l : labels_) ++sizes_[l];
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t p = 0; p < labels_.size(); ++p)
        if (p != i) sums_[i * c_ + labels_[p]] += dist(i, p);
  }

  /// Mean silhouette; a member alone in its cluster scores 0, as does a
  /// member whose a and b are both 0.
  double average() const {
    const std::size_t n = labels_.size();
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t own = labels_[i];
      if (sizes_[own] <= 1) continue;
      const double a = sums_[i * c_ + own] / static_cast<double>(sizes_[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < c_; ++c)
        if (c != own && sizes_[c] > 0) b = std::min(b, sums_[i * c_ + c] / static_cast<double>(sizes_[c]));
      if (!std::isfinite(b)) continue;
      const double denom = std::max(a, b);
      if (denom > 0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
  }

  void move(std::size_t member, std::size_t to) {
    const std::size_t from = labels_[member];
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (i == member) continue;
      const double dm = (*dist_)(i, member);
      sums_[i * c_ + from] -= dm;
      sums_[i * c_ + to] += dm;
    }
    --sizes_[from];
    ++sizes_[to];
    labels_[member] = to;
  }

  std::size_t label(std::size_t member) const { return labels_[member]; }
  std::size_t cluster_size(std::size_t c) const { return sizes_[c]; }
  std::size_t cluster_count() const { return c_; }
  ClusterConfiguration configuration() const { return {labels_, c_}; }

 private:
  const DistanceMatrix* dist_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> sizes_;
  std::vector<double> sums_;
  std::size_t c_;
};

inline double average_silhouette(const DistanceMatrix& dist, const ClusterConfiguration& config) {
  return SilhouetteState(dist, config).average();
}

struct HillClimbResult {
  ClusterConfiguration configuration;
  double asw = 0;
  std::size_t moves = 0;
};

/// Repeatedly applies the single-member move with the largest ASW gain
/// (ties: lowest member, then lowest target cluster) until no move
/// improves.  Moves that would empty a cluster are not considered.
inline HillClimbResult hill_climb(const DistanceMatrix& dist, const ClusterConfiguration& start) {
  constexpr double min_gain = 1e-12;
  HillClimbResult r{start, average_silhouette(dist, start), 0};
  for (;;) {
    SilhouetteState state(dist, r.configuration);
    double best = r.asw;
    std::size_t best_member = 0, best_target = 0;
    bool found = false;
    for (std::size_t p = 0; p < r.configuration.labels.size(); ++p) {
      const std::size_t from = state.label(p);
      if (state.cluster_size(from) <= 1) continue;
      for (std::size_t c = 0; c < state.cluster_count(); ++c) {
        if (c == from) continue;
        state.move(p, c);
        const double v = state.average();
        state.move(p, from);
        if (v > best + min_gain) {
          best = v;
          best_member = p;
          best_target = c;
          found = true;
        }
      }
    }
    if (!found) return r;
    r.configuration.labels[best_member] = best_target;
    r.asw = average_silhouette(dist, r.configuration);
    ++r.moves;
  }
}

/// Average Silhouette Width faultline score: indicator encoding, Ward and
/// average-linkage dendrogram cuts for every c in 2..|T|-1, local-move
/// refinement of each cut, and the best resulting average silhouette.
inline double asw_score(const Team& team, const Population& pop) {
  const auto& mem = team.members();
  if (mem.size() < 3) throw PreconditionError("asw_score: team needs at least three members");
  const auto dist = DistanceMatrix::euclidean(indicator_encode(pop, mem));
  double best = -1.0;
  for (auto linkage : {Linkage::ward, Linkage::average})
    for (const auto& config : agglomerative_configurations(dist, linkage))
      best = std::max(best, hill_climb(dist, config).asw);
  return best;
}

}  // namespace faultline
